//! Rendering of command results as JSON or CSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// How floating-point values are printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Digits {
    /// 17 significant digits in exponent form.
    Full,
    /// Rounded to this many significant digits, shortest form.
    Round(usize),
}

impl Digits {
    pub fn number(self, x: f64) -> String {
        match self {
            Digits::Full => format!("{x:.16e}"),
            Digits::Round(d) => {
                let s = format!("{:.*e}", d.saturating_sub(1), x);
                let y: f64 = s.parse().expect("formatted float parses");
                format!("{y}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    List(Vec<Field>),
    Obj(Vec<(String, Field)>),
    Null,
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<usize> for Field {
    fn from(x: usize) -> Self {
        Field::Int(x as i64)
    }
}

impl From<u32> for Field {
    fn from(x: u32) -> Self {
        Field::Int(x as i64)
    }
}

impl From<u64> for Field {
    fn from(x: u64) -> Self {
        Field::Int(x as i64)
    }
}

impl From<bool> for Field {
    fn from(x: bool) -> Self {
        Field::Bool(x)
    }
}

impl From<&str> for Field {
    fn from(x: &str) -> Self {
        Field::Str(x.to_string())
    }
}

impl From<String> for Field {
    fn from(x: String) -> Self {
        Field::Str(x)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(x: Option<T>) -> Self {
        x.map_or(Field::Null, Into::into)
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

impl Field {
    fn write_json(&self, out: &mut String, digits: Digits) {
        match self {
            Field::Num(x) if x.is_finite() => out.push_str(&digits.number(*x)),
            Field::Num(_) | Field::Null => out.push_str("null"),
            Field::Int(i) => write!(out, "{i}").unwrap(),
            Field::Str(s) => out.push_str(&quote(s)),
            Field::Bool(b) => write!(out, "{b}").unwrap(),
            Field::List(items) => {
                out.push('[');
                for (i, f) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    f.write_json(out, digits);
                }
                out.push(']');
            }
            Field::Obj(pairs) => write_object(out, pairs.iter().map(|(k, v)| (k.as_str(), v)), digits),
        }
    }

    fn csv_cell(&self, digits: Digits) -> String {
        match self {
            Field::Num(x) if x.is_finite() => digits.number(*x),
            Field::Num(x) => format!("{x}"),
            Field::Int(i) => i.to_string(),
            Field::Str(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Field::Str(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
            Field::Null => String::new(),
            Field::List(items) => items.iter().map(|f| f.csv_cell(digits)).collect::<Vec<_>>().join(";"),
            Field::Obj(pairs) => pairs
                .iter()
                .map(|(k, v)| format!("{k}={}", v.csv_cell(digits)))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

fn write_object<'a>(out: &mut String, pairs: impl Iterator<Item = (&'a str, &'a Field)>, digits: Digits) {
    out.push('{');
    for (i, (k, v)) in pairs.enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&quote(k));
        out.push(':');
        v.write_json(out, digits);
    }
    out.push('}');
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rows {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Rows {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Rows {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn from_table(name: &str, table: &steklov_core::experiments::Table) -> Self {
        Rows {
            name: name.to_string(),
            columns: table.columns.clone(),
            rows: table.rows.iter().map(|r| r.iter().map(|&x| Field::Num(x)).collect()).collect(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self, out: &mut String, digits: Digits) {
        out.push('[');
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_object(out, self.columns.iter().map(String::as_str).zip(row), digits);
        }
        out.push(']');
    }

    pub fn to_csv(&self, digits: Digits) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|f| f.csv_cell(digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Result of one command: scalar fields plus named tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Doc {
    /// File name stem used with `--out`.
    pub stem: String,
    pub fields: Vec<(String, Field)>,
    pub tables: Vec<Rows>,
}

impl Doc {
    pub fn new(stem: impl Into<String>) -> Self {
        Doc {
            stem: stem.into(),
            fields: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn field(mut self, key: &str, value: impl Into<Field>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn table(mut self, rows: Rows) -> Self {
        self.tables.push(rows);
        self
    }

    pub fn to_json(&self, digits: Digits) -> String {
        let mut out = String::from("{");
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&quote(k));
            out.push(':');
            v.write_json(&mut out, digits);
        }
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 || !self.fields.is_empty() {
                out.push(',');
            }
            out.push_str(&quote(&t.name));
            out.push(':');
            t.to_json(&mut out, digits);
        }
        out.push_str("}\n");
        out
    }

    /// Scalar fields as a one-row CSV.
    pub fn fields_csv(&self, digits: Digits) -> String {
        let header: Vec<&str> = self.fields.iter().map(|(k, _)| k.as_str()).collect();
        let cells: Vec<String> = self.fields.iter().map(|(_, v)| v.csv_cell(digits)).collect();
        format!("{}\n{}\n", header.join(","), cells.join(","))
    }

    /// CSV for stdout: a single table as is, otherwise sections headed by `# name`.
    pub fn to_csv(&self, digits: Digits) -> String {
        match self.tables.as_slice() {
            [] => self.fields_csv(digits),
            [t] => t.to_csv(digits),
            ts => {
                let mut out = format!("# fields\n{}", self.fields_csv(digits));
                for t in ts {
                    write!(out, "\n# {}\n{}", t.name, t.to_csv(digits)).unwrap();
                }
                out
            }
        }
    }

    pub fn render(&self, format: Format, digits: Digits) -> String {
        match format {
            Format::Json => self.to_json(digits),
            Format::Csv => self.to_csv(digits),
        }
    }

    /// Files written under `--out`: one JSON document, or for CSV the scalar
    /// fields in `{stem}.csv` plus `{stem}_{table}.csv` per table.
    pub fn files(&self, format: Format, digits: Digits) -> Vec<(String, String)> {
        match (format, self.tables.len()) {
            (Format::Csv, k) if k > 0 => {
                let mut files = vec![(format!("{}.csv", self.stem), self.fields_csv(digits))];
                for t in &self.tables {
                    files.push((format!("{}_{}.csv", self.stem, t.name), t.to_csv(digits)));
                }
                files
            }
            _ => vec![(format!("{}.{}", self.stem, format.extension()), self.render(format, digits))],
        }
    }
}
