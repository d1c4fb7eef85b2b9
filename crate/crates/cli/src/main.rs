//! `steklov`: command-line access to the spectral toolkit.

mod config;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use steklov_core::bounds::{
    appendix_comparator, bound_m1_plus_1, bound_m1_plus_1_global, bound_sigma1, bound_sigma2_to_m1,
    critical_length_l1, critical_length_l2, critical_length_li_star, li_star_upper_bound, stability_constants,
    stability_gap_cnl, stability_gap_cnlm, BoundValue, CriticalLength,
};
use steklov_core::experiments::{figure_data, run_experiment, ExperimentId, ExperimentReport, Figure};
use steklov_core::profiles::{halves, Profile, ProfileSpec};
use steklov_core::solver::{mixed_eigenvalue, steklov_spectrum, SolverConfig};
use steklov_core::Dim;
use thiserror::Error;

use config::FileConfig;
use output::{Digits, Doc, Field, Format, Rows};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] steklov_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Failed(_) => 3,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Failed(_) => "verification_failed",
        }
    }

    fn record(&self) -> String {
        let message = self.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": message,
        })
        .to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "steklov", version, about = "Steklov spectra of hypersurfaces of revolution with two boundary spheres")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML file with defaults for the options below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dimension n >= 3.
    #[arg(long = "n", global = true)]
    n: Option<u32>,
    /// Meridian length.
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    length: Option<f64>,
    /// Number of finite elements.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Highest mode the spectrum sweep may visit.
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Extra modes checked after the sweep cutoff.
    #[arg(long, global = true)]
    margin: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Round numbers to this many significant digits.
    #[arg(long, global = true)]
    round: Option<usize>,
    /// Write results into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report wall-clock time on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First K eigenvalues of a profile, with mode and parity.
    Spectrum {
        /// Profile description (JSON).
        #[arg(long)]
        profile: PathBuf,
        #[arg(short = 'K', long = "count")]
        count: usize,
    },
    /// Mixed Steklov-Dirichlet / Steklov-Neumann eigenvalues of the half profile, per mode.
    Mixed {
        #[arg(long)]
        profile: PathBuf,
        /// Highest mode listed.
        #[arg(long, default_value_t = 4)]
        modes: usize,
        #[arg(long, value_enum, default_value_t = Condition::Both)]
        condition: Condition,
    },
    /// Upper bounds for eigenvalues.
    Bound {
        #[arg(value_enum, ignore_case = true)]
        which: BoundKind,
    },
    /// Critical lengths.
    CriticalLength {
        #[arg(value_enum, ignore_case = true)]
        which: CriticalKind,
        /// Index of the Li-star length.
        #[arg(long)]
        i: Option<usize>,
    },
    /// Stability constants and gaps.
    Stability {
        #[arg(value_enum, ignore_case = true)]
        which: StabilityKind,
        /// Plateau height; selects the plateau gap.
        #[arg(long)]
        m: Option<f64>,
        /// Plateau smoothing width.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Run a verification experiment (sharpness, monotonicity, stability, minmax).
    Verify { id: String },
    /// Curves behind the bound figures.
    Figure {
        #[arg(value_enum, ignore_case = true)]
        which: FigureKind,
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 10.0)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Condition {
    Dirichlet,
    Neumann,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundKind {
    #[value(name = "sigma1")]
    Sigma1,
    #[value(name = "sigma2-m1")]
    Sigma2M1,
    #[value(name = "m1plus1")]
    M1Plus1,
    #[value(name = "m1plus1-global")]
    M1Plus1Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriticalKind {
    #[value(name = "L1")]
    L1,
    #[value(name = "L2")]
    L2,
    #[value(name = "Li-star")]
    LiStar,
    #[value(name = "appendix")]
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StabilityKind {
    Constants,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureKind {
    #[value(name = "bn-of-l")]
    BnOfL,
    #[value(name = "bn-m1plus1-of-l")]
    BnM1Plus1OfL,
    #[value(name = "appendix-curves")]
    AppendixCurves,
}

impl FigureKind {
    fn figure(self) -> Figure {
        match self {
            FigureKind::BnOfL => Figure::BnOfL,
            FigureKind::BnM1Plus1OfL => Figure::BnM1Plus1OfL,
            FigureKind::AppendixCurves => Figure::AppendixCurves,
        }
    }
}

/// Options after merging flags, config file and defaults.
struct Settings {
    n: Option<u32>,
    length: Option<f64>,
    solver: SolverConfig,
    format: Format,
    digits: Digits,
    out: Option<PathBuf>,
    verbose: bool,
}

impl Settings {
    fn resolve(g: &Global) -> Result<Self, CliError> {
        let file = match &g.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            grid: g.grid.or(file.grid).unwrap_or(defaults.grid),
            k_max: g.k_max.or(file.k_max).unwrap_or(defaults.k_max),
            margin: g.margin.or(file.margin).unwrap_or(defaults.margin),
        };
        let digits = match g.round.or(file.round) {
            Some(0) => return Err(CliError::Usage("--round needs at least 1 digit".into())),
            Some(d) => Digits::Round(d),
            None => Digits::Full,
        };
        Ok(Settings {
            n: g.n.or(file.n),
            length: g.length.or(file.length),
            solver,
            format: g.format.or(file.format).unwrap_or_default(),
            digits,
            out: g.out.clone(),
            verbose: g.verbose,
        })
    }

    fn dim(&self) -> Result<Dim, CliError> {
        let n = self.n.ok_or_else(|| CliError::Usage("missing --n".into()))?;
        Ok(Dim::new(n)?)
    }

    fn length(&self) -> Result<f64, CliError> {
        self.length.ok_or_else(|| CliError::Usage("missing --L".into()))
    }
}

fn load_profile(path: &Path) -> Result<Profile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read profile {}: {e}", path.display())))?;
    Ok(ProfileSpec::from_json(&text)?.build()?)
}

fn bound_doc(stem: String, which: &str, n: Dim, length: Option<f64>, b: BoundValue) -> Doc {
    Doc::new(stem)
        .field("bound", which)
        .field("n", n.get())
        .field("L", length)
        .field("value", b.value)
        .field("branch", b.branch.to_string())
        .field("outer_radius", b.outer_radius)
}

fn critical_fields(doc: Doc, c: &CriticalLength) -> Doc {
    let bracket = c.bracket.map(|(a, b)| Field::List(vec![a.into(), b.into()]));
    doc.field("L", c.length)
        .field("outer_radius", c.outer_radius())
        .field("residual", c.residual)
        .field("bracket", bracket.unwrap_or(Field::Null))
}

fn numbers(map: &std::collections::BTreeMap<String, f64>) -> Field {
    Field::Obj(map.iter().map(|(k, &v)| (k.clone(), v.into())).collect())
}

fn report_doc(r: &ExperimentReport) -> Doc {
    let checks = r
        .checks
        .iter()
        .map(|c| {
            Field::Obj(vec![
                ("invariant".into(), c.invariant.as_str().into()),
                ("passed".into(), c.passed.into()),
                ("detail".into(), c.detail.as_str().into()),
            ])
        })
        .collect();
    let mut doc = Doc::new(r.file_stem())
        .field("id", r.id.as_str())
        .field("n", r.n)
        .field("grid", r.grid)
        .field("passed", r.passed())
        .field("parameters", numbers(&r.parameters))
        .field("tolerances", numbers(&r.tolerances))
        .field("checks", Field::List(checks));
    for (name, t) in &r.tables {
        doc = doc.table(Rows::from_table(name, t));
    }
    doc
}

/// Runs the command; a document is returned alongside a failed verification.
fn execute(cmd: &Command, s: &Settings) -> Result<(Doc, Option<CliError>), CliError> {
    let doc = match cmd {
        Command::Spectrum { profile, count } => {
            let n = s.dim()?;
            let p = load_profile(profile)?;
            let spec = steklov_spectrum(&p, n, *count, &s.solver)?;
            let mut rows = Rows::new("eigenvalues", &["index", "sigma", "mode", "parity"]);
            for i in 0..spec.len() {
                let e = spec.entry_of(i).expect("index below len");
                rows.push(vec![i.into(), e.sigma.into(), e.mode.into(), e.parity.as_str().into()]);
            }
            Doc::new(format!("spectrum_n{}_N{}", n.get(), s.solver.grid))
                .field("n", n.get())
                .field("L", p.length())
                .field("grid", s.solver.grid)
                .field("count", *count)
                .table(rows)
        }
        Command::Mixed { profile, modes, condition } => {
            let n = s.dim()?;
            let p = load_profile(profile)?;
            let (hd, hn) = halves(&p)?;
            let cols: &[&str] = match condition {
                Condition::Dirichlet => &["k", "dirichlet"],
                Condition::Neumann => &["k", "neumann"],
                Condition::Both => &["k", "dirichlet", "neumann"],
            };
            let mut rows = Rows::new("modes", cols);
            for k in 0..=*modes {
                let mut row = vec![Field::from(k)];
                if *condition != Condition::Neumann {
                    row.push(mixed_eigenvalue(&hd, n, k, s.solver.grid)?.into());
                }
                if *condition != Condition::Dirichlet {
                    row.push(mixed_eigenvalue(&hn, n, k, s.solver.grid)?.into());
                }
                rows.push(row);
            }
            Doc::new(format!("mixed_n{}_N{}", n.get(), s.solver.grid))
                .field("n", n.get())
                .field("half_length", hd.half_length())
                .field("grid", s.solver.grid)
                .table(rows)
        }
        Command::Bound { which } => {
            let n = s.dim()?;
            let name = which.to_possible_value().expect("no skipped variants").get_name().to_string();
            let stem = format!("bound_{name}_n{}", n.get());
            match which {
                BoundKind::M1Plus1Global => bound_doc(stem, &name, n, None, bound_m1_plus_1_global(n)?),
                _ => {
                    let l = s.length()?;
                    let b = match which {
                        BoundKind::Sigma1 => bound_sigma1(n, l)?,
                        BoundKind::Sigma2M1 => bound_sigma2_to_m1(n, l)?,
                        _ => bound_m1_plus_1(n, l)?,
                    };
                    bound_doc(stem, &name, n, Some(l), b)
                }
            }
        }
        Command::CriticalLength { which, i } => {
            let n = s.dim()?;
            let name = which.to_possible_value().expect("no skipped variants").get_name().to_string();
            let doc = Doc::new(format!("critical_length_{name}_n{}", n.get()))
                .field("quantity", name.as_str())
                .field("n", n.get());
            match which {
                CriticalKind::L1 => {
                    let (c, b) = critical_length_l1(n)?;
                    critical_fields(doc, &c).field("bound", b.value).field("branch", b.branch.to_string())
                }
                CriticalKind::L2 => critical_fields(doc, &critical_length_l2(n)?),
                CriticalKind::LiStar => {
                    let i = i.ok_or_else(|| CliError::Usage("Li-star needs --i".into()))?;
                    let c = critical_length_li_star(n, i)?;
                    critical_fields(doc.field("i", i), &c).field("upper_bound", li_star_upper_bound(n, i))
                }
                CriticalKind::Appendix => {
                    let (ld, ln, branch) = appendix_comparator(n)?;
                    doc.field("L_D", ld.length)
                        .field("L_N", ln.length)
                        .field("residual_D", ld.residual)
                        .field("residual_N", ln.residual)
                        .field("branch", branch.to_string())
                }
            }
        }
        Command::Stability { which, m, delta } => {
            let n = s.dim()?;
            match which {
                StabilityKind::Constants => {
                    let c = stability_constants(n)?;
                    Doc::new(format!("stability_constants_n{}", n.get()))
                        .field("n", n.get())
                        .field("c1", c.c1)
                        .field("c2", c.c2)
                        .field("c", c.c)
                }
                StabilityKind::Gap => {
                    let l = s.length()?;
                    let doc = Doc::new(format!("stability_gap_n{}", n.get())).field("n", n.get()).field("L", l);
                    match m {
                        Some(m) => doc
                            .field("kind", "plateau")
                            .field("m", *m)
                            .field("delta", *delta)
                            .field("grid", s.solver.grid)
                            .field("gap", stability_gap_cnlm(n, l, *m, *delta, &s.solver)?),
                        None => doc.field("kind", "critical").field("gap", stability_gap_cnl(n, l)?),
                    }
                }
            }
        }
        Command::Verify { id } => {
            let n = s.dim()?;
            let id = ExperimentId::parse(id)?;
            let report = run_experiment(id, n, s.length.unwrap_or(2.0), &s.solver)?;
            if s.verbose {
                eprintln!("{} finished in {:.3} s", id.as_str(), report.runtime.as_secs_f64());
            }
            let failed = (!report.passed()).then(|| {
                let names: Vec<&str> =
                    report.checks.iter().filter(|c| !c.passed).map(|c| c.invariant.as_str()).collect();
                CliError::Failed(format!("{} failed: {}", id.as_str(), names.join(", ")))
            });
            return Ok((report_doc(&report), failed));
        }
        Command::Figure { which, from, to, points } => {
            let n = s.dim()?;
            if *points < 2 {
                return Err(CliError::Usage("--points must be at least 2".into()));
            }
            let lengths: Vec<f64> =
                (0..*points).map(|i| from + (to - from) * i as f64 / (*points - 1) as f64).collect();
            let fig = figure_data(which.figure(), n, &lengths)?;
            let annotations = Field::Obj(fig.annotations.iter().map(|(k, &v)| (k.clone(), v.into())).collect());
            Doc::new(format!("figure_{}_n{}", fig.figure.as_str(), n.get()))
                .field("figure", fig.figure.as_str())
                .field("n", n.get())
                .field("annotations", annotations)
                .table(Rows::from_table("curves", &fig.table))
        }
    };
    Ok((doc, None))
}

/// Writes to stdout; a closed pipe is not an error.
fn say(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("cannot write to stdout: {e}"))),
        _ => Ok(()),
    }
}

fn emit(doc: &Doc, s: &Settings) -> Result<(), CliError> {
    match &s.out {
        None => say(&doc.render(s.format, s.digits))?,
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
            for (name, body) in doc.files(s.format, s.digits) {
                let path = dir.join(name);
                std::fs::write(&path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
                say(&format!("{}\n", path.display()))?;
            }
        }
    }
    Ok(())
}

fn run(args: Vec<String>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            return say(&e.to_string());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let settings = Settings::resolve(&cli.global)?;
    let (doc, failure) = execute(&cli.command, &settings)?;
    emit(&doc, &settings)?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
