//! Sorted Steklov spectra with mode provenance.

use serde::Serialize;

/// Reflection parity of an eigenfunction under `r -> L - r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        }
    }
}

/// One distinct eigenvalue of one mode, repeated `mult` times in the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub sigma: f64,
    pub mode: usize,
    pub parity: Parity,
    pub mult: u64,
}

/// The first `count` eigenvalues counted with multiplicity.
///
/// Entries are kept whole, so the expanded multiset may be longer than
/// `count`; accessors only expose the first `count` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    entries: Vec<SpectrumEntry>,
    count: usize,
}

impl Spectrum {
    /// Sorts `entries` and keeps the ones needed to cover `count` values.
    pub fn from_entries(mut entries: Vec<SpectrumEntry>, count: usize) -> Self {
        entries.sort_by(|a, b| {
            a.sigma
                .total_cmp(&b.sigma)
                .then(a.mode.cmp(&b.mode))
                .then(a.parity.cmp(&b.parity))
        });
        let mut covered = 0u64;
        let mut keep = 0;
        for e in &entries {
            if covered >= count as u64 {
                break;
            }
            covered += e.mult;
            keep += 1;
        }
        entries.truncate(keep);
        Spectrum { entries, count }
    }

    pub fn len(&self) -> usize {
        self.count.min(self.expanded_len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn expanded_len(&self) -> usize {
        self.entries.iter().map(|e| e.mult as usize).sum()
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// `sigma_i`, counted with multiplicity (`i = 0` is the zero eigenvalue).
    pub fn sigma(&self, i: usize) -> Option<f64> {
        self.entry_of(i).map(|e| e.sigma)
    }

    /// Entry that produces the `i`-th value counted with multiplicity.
    pub fn entry_of(&self, i: usize) -> Option<&SpectrumEntry> {
        if i >= self.count {
            return None;
        }
        let mut seen = 0usize;
        for e in &self.entries {
            seen += e.mult as usize;
            if i < seen {
                return Some(e);
            }
        }
        None
    }

    /// The first `count` values, expanded by multiplicity.
    pub fn values(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.sigma, e.mult as usize))
            .take(self.count)
            .collect()
    }

    /// Distinct values `sigma_(k)`; values within `rel_tol` of each other are merged.
    pub fn distinct(&self, rel_tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            match out.last() {
                Some(&last) if (e.sigma - last).abs() <= rel_tol * last.abs().max(e.sigma.abs()) => {}
                _ => out.push(e.sigma),
            }
        }
        out
    }

    /// `sigma_(k)`, the `k`-th eigenvalue counted without multiplicity.
    pub fn sigma_distinct(&self, k: usize) -> Option<f64> {
        self.distinct(1e-12).get(k).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(sigma: f64, mode: usize, mult: u64) -> SpectrumEntry {
        SpectrumEntry {
            sigma,
            mode,
            parity: Parity::None,
            mult,
        }
    }

    #[test]
    fn expands_and_truncates() {
        let s = Spectrum::from_entries(vec![e(1.4, 1, 3), e(0.0, 0, 1), e(2.0, 0, 1), e(5.0, 2, 5)], 4);
        assert_eq!(s.values(), vec![0.0, 1.4, 1.4, 1.4]);
        assert_eq!(s.entries().len(), 2);
        assert_eq!(s.sigma(3), Some(1.4));
        assert_eq!(s.sigma(4), None);
        assert_eq!(s.sigma_distinct(1), Some(1.4));
    }

    #[test]
    fn overshooting_entry_is_kept_whole() {
        let s = Spectrum::from_entries(vec![e(0.0, 0, 1), e(1.0, 1, 3)], 2);
        assert_eq!(s.len(), 2);
        assert_eq!(s.entries()[1].mult, 3);
        assert_eq!(s.values(), vec![0.0, 1.0]);
    }
}
