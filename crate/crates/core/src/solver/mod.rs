//! Per-mode finite-element reduction of the Steklov problem.
//!
//! Each spherical-harmonic mode gives a radial problem on `[0, L]` whose
//! Dirichlet-to-Neumann map is a symmetric 2x2 matrix; its two eigenvalues
//! are the mode's Steklov eigenvalues.

mod convergence;
mod fem;
mod grid;
mod mixed;
mod rayleigh;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modes::{multiplicity, Dim, DEFAULT_K_MAX};
use crate::profiles::{validate, HalfProfile, Profile};
use crate::spectrum::{Parity, Spectrum, SpectrumEntry};

pub use convergence::{convergence_study, mixed_convergence_study, richardson, ConvergenceRow, ConvergenceTable};
pub use fem::ModeSystem;
use fem::Far;
pub use mixed::{mixed_eigenfunction, mixed_eigenvalue};
pub use rayleigh::{dtn_eigenfunction, rayleigh_quotient, reflect_test_function, ModeFunction};

/// Default number of elements.
pub const DEFAULT_GRID: usize = 4096;
/// Smallest accepted number of elements.
pub const MIN_GRID: usize = 16;
/// Extra modes examined after the sweep cutoff.
pub const DEFAULT_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Number of elements on the profile's interval.
    pub grid: usize,
    pub k_max: usize,
    pub margin: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid: DEFAULT_GRID,
            k_max: DEFAULT_K_MAX,
            margin: DEFAULT_MARGIN,
        }
    }
}

impl SolverConfig {
    pub fn with_grid(grid: usize) -> Self {
        SolverConfig {
            grid,
            ..SolverConfig::default()
        }
    }
}

pub(crate) fn check_grid(grid: usize) -> Result<()> {
    if grid < MIN_GRID {
        return domain(format!("grid size must be at least {MIN_GRID}, got {grid}"));
    }
    Ok(())
}

/// Symmetric 2x2 Dirichlet-to-Neumann matrix of one mode.
///
/// Index 0 is the boundary sphere at `r = 0`, index 1 the one at `r = L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DtnMatrix {
    pub entries: [[f64; 2]; 2],
    pub k: usize,
    pub grid: usize,
    /// Set when the profile is reflection symmetric.
    pub symmetric: bool,
}

impl DtnMatrix {
    pub fn norm(&self) -> f64 {
        let e = &self.entries;
        (e[0][0].powi(2) + e[1][1].powi(2) + 2.0 * e[0][1].powi(2)).sqrt()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [[a, b], [_, c]] = self.entries;
        let mean = 0.5 * (a + c);
        let rad = (0.5 * (a - c)).hypot(b);
        let mut lo = mean - rad;
        let hi = mean + rad;
        if self.k == 0 {
            lo = 0.0;
        } else if lo.abs() < 4.0 * f64::EPSILON * hi {
            lo = (a * c - b * b) / hi;
        }
        [lo, hi]
    }

    /// Eigenvalues with parities, ascending; parities are `None` for asymmetric profiles.
    pub fn eigenpairs(&self) -> [(f64, Parity); 2] {
        let [lo, hi] = self.eigenvalues();
        if !self.symmetric {
            return [(lo, Parity::None), (hi, Parity::None)];
        }
        // Symmetric matrices [[a, b], [b, a]] have even eigenvalue a + b.
        if self.entries[0][1] <= 0.0 {
            [(lo, Parity::Even), (hi, Parity::Odd)]
        } else {
            [(lo, Parity::Odd), (hi, Parity::Even)]
        }
    }

    /// Unit eigenvector of the eigenvalue `sigma`.
    pub fn eigenvector(&self, sigma: f64) -> [f64; 2] {
        let [[a, b], [_, c]] = self.entries;
        let v = if (a - sigma).abs() >= (c - sigma).abs() {
            [-b, a - sigma]
        } else {
            [c - sigma, -b]
        };
        let norm = v[0].hypot(v[1]);
        if norm == 0.0 {
            return if a <= c { [1.0, 0.0] } else { [0.0, 1.0] };
        }
        [v[0] / norm, v[1] / norm]
    }
}

/// Mode system of a valid profile on a grid of `grid` elements.
pub fn mode_system(p: &Profile, n: Dim, k: usize, grid: usize) -> Result<ModeSystem> {
    check_grid(grid)?;
    let report = validate(p);
    if !report.is_valid() {
        return Err(Error::InvalidProfile(report));
    }
    Ok(system_unchecked(p, n, k, grid))
}

fn system_unchecked(p: &Profile, n: Dim, k: usize, grid: usize) -> ModeSystem {
    let length = p.length();
    if p.is_symmetric() {
        let c = 0.5 * length;
        let bps: Vec<f64> = p.breakpoints().into_iter().filter(|&b| b < c).collect();
        let half = grid::fit_grid(&bps, c, grid.div_ceil(2));
        ModeSystem::assemble_mirrored(p.warp(), &half, length, n, k)
    } else {
        let nodes = grid::fit_grid(&p.breakpoints(), length, grid);
        ModeSystem::assemble(p.warp(), nodes, n, k)
    }
}

/// Harmonic extensions of the two boundary unit vectors.
pub(crate) struct Extensions {
    /// `u_0 = 1`, `u_end = 0`.
    pub(crate) left: Vec<f64>,
    /// `u_0 = 0`, `u_end = 1`.
    pub(crate) right: Vec<f64>,
}

fn condense(sys: &ModeSystem, symmetric: bool) -> (DtnMatrix, Extensions) {
    let m = sys.cells();
    let d = sys.sweep_from_right(Far::Pinned);
    let left = sys.extend_from_left(&d);
    let s00 = d[0];
    let (s11, right) = if symmetric {
        let mut right = left.clone();
        right.reverse();
        (s00, right)
    } else {
        let e = sys.sweep_from_left(Far::Pinned);
        (e[m], sys.extend_from_right(&e))
    };
    // Flux through the last node of the extension of (1, 0).
    let s01 = -(sys.stiffness[m - 1] - sys.mass_off[m - 1]) * left[m - 1];
    (
        DtnMatrix {
            entries: [[s00, s01], [s01, s11]],
            k: sys.k,
            grid: m,
            symmetric,
        },
        Extensions { left, right },
    )
}

/// Dirichlet-to-Neumann matrix of mode `k`.
pub fn mode_dtn(p: &Profile, n: Dim, k: usize, grid: usize) -> Result<DtnMatrix> {
    let sys = mode_system(p, n, k, grid)?;
    Ok(condense(&sys, p.is_symmetric()).0)
}

pub(crate) fn dtn_with_extensions(p: &Profile, n: Dim, k: usize, grid: usize) -> Result<(ModeSystem, DtnMatrix, Extensions)> {
    let sys = mode_system(p, n, k, grid)?;
    let (d, e) = condense(&sys, p.is_symmetric());
    Ok((sys, d, e))
}

/// The first `count` Steklov eigenvalues counted with multiplicity.
///
/// Modes are swept upwards until the smaller eigenvalue of a mode exceeds
/// the current `count`-th candidate; `margin` further modes are then checked
/// and any of them contributing a smaller value is reported as an error.
pub fn steklov_spectrum(p: &Profile, n: Dim, count: usize, cfg: &SolverConfig) -> Result<Spectrum> {
    if count == 0 {
        return domain("eigenvalue count must be positive");
    }
    check_grid(cfg.grid)?;
    let report = validate(p);
    if !report.is_valid() {
        return Err(Error::InvalidProfile(report));
    }
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    let mut cutoff: Option<(usize, f64)> = None;
    let mut k = 0;
    loop {
        if k > cfg.k_max {
            return Err(Error::Resource(format!(
                "{count} eigenvalues need modes beyond k_max = {}",
                cfg.k_max
            )));
        }
        let sys = system_unchecked(p, n, k, cfg.grid);
        let dtn = condense(&sys, p.is_symmetric()).0;
        let mult = multiplicity(n, k)?;
        let pairs = dtn.eigenpairs();
        if let Some((at, threshold)) = cutoff {
            if pairs[0].0 < threshold {
                return Err(Error::ModeOrdering(format!(
                    "mode {k} has eigenvalue {} below the cutoff {threshold} set at mode {at}",
                    pairs[0].0
                )));
            }
            if k >= at + cfg.margin {
                break;
            }
        } else if let Some(kth) = kth_value(&entries, count) {
            if pairs[0].0 > kth {
                cutoff = Some((k, kth));
                if cfg.margin == 0 {
                    break;
                }
                k += 1;
                continue;
            }
        }
        for (sigma, parity) in pairs {
            entries.push(SpectrumEntry {
                sigma,
                mode: k,
                parity,
                mult,
            });
        }
        k += 1;
    }
    Ok(Spectrum::from_entries(entries, count))
}

/// A spectral value on grids `N` and `N/2` with its order-2 extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolated {
    pub value: f64,
    /// Value on the configured grid.
    pub raw: f64,
    /// `|raw - coarse| / 3`, the estimated error of `raw`.
    pub error: f64,
}

/// `sigma_index` (with multiplicity) extrapolated from grids `N` and `N/2`.
pub fn sigma_extrapolated(p: &Profile, n: Dim, index: usize, cfg: &SolverConfig) -> Result<Extrapolated> {
    let coarse_cfg = SolverConfig {
        grid: cfg.grid / 2,
        ..*cfg
    };
    let pick = |c: &SolverConfig| {
        steklov_spectrum(p, n, index + 1, c)?
            .sigma(index)
            .ok_or_else(|| Error::Internal("spectrum shorter than requested".into()))
    };
    let raw = pick(cfg)?;
    let coarse = pick(&coarse_cfg)?;
    Ok(Extrapolated {
        value: raw + (raw - coarse) / 3.0,
        raw,
        error: (raw - coarse).abs() / 3.0,
    })
}

/// The `count`-th smallest value (1-based, with multiplicity) among `entries`.
fn kth_value(entries: &[SpectrumEntry], count: usize) -> Option<f64> {
    let mut v: Vec<(f64, u64)> = entries.iter().map(|e| (e.sigma, e.mult)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut seen = 0u64;
    for (s, m) in v {
        seen += m;
        if seen >= count as u64 {
            return Some(s);
        }
    }
    None
}

/// Mixed eigenvalue on a half profile with the default grid.
pub fn mixed_eigenvalue_default(hp: &HalfProfile, n: Dim, k: usize) -> Result<f64> {
    mixed_eigenvalue(hp, n, k, DEFAULT_GRID)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::{sd_eigenvalue, sn_eigenvalue, OuterRadius};
    use crate::profiles::{degenerate_profile, smoothed_max_profile, SmoothingShape};

    fn dim(n: u32) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn cylinder_modes() {
        let p = Profile::cylinder(2.0).unwrap();
        let d = mode_dtn(&p, dim(3), 0, 512).unwrap();
        let [lo, hi] = d.eigenvalues();
        assert_eq!(lo, 0.0);
        assert!((hi - 1.0).abs() < 1e-12);
        let d = mode_dtn(&p, dim(3), 1, 4096).unwrap();
        let s = 2f64.sqrt();
        let [lo, hi] = d.eigenvalues();
        assert!((lo - s * s.tanh()).abs() < 1e-6);
        assert!((hi - s / s.tanh()).abs() < 1e-6);
        assert_eq!(d.eigenpairs()[0].1, Parity::Even);
        assert_eq!(d.entries[0][0], d.entries[1][1]);
    }

    #[test]
    fn cylinder_spectrum() {
        let p = Profile::cylinder(2.0).unwrap();
        let s = steklov_spectrum(&p, dim(3), 2, &SolverConfig::default()).unwrap();
        let v = s.values();
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 1.0).abs() < 1e-10);
        assert_eq!(s.entry_of(0).unwrap().parity, Parity::Even);
    }

    #[test]
    fn degenerate_spectrum_matches_gluing() {
        let p = degenerate_profile(2.0).unwrap();
        let s = steklov_spectrum(&p, dim(3), 2, &SolverConfig::default()).unwrap();
        assert!((s.sigma(1).unwrap() - 1.4).abs() < 1e-6);
    }

    #[test]
    fn asymmetric_profile_uses_full_grid() {
        let p = Profile::sampled_from(2.0, 64, |r| 1.0 + 0.2 * (std::f64::consts::PI * r / 2.0).sin() * (r / 2.0)).unwrap();
        assert!(!p.is_symmetric());
        let d = mode_dtn(&p, dim(3), 1, 256).unwrap();
        assert!((d.entries[0][1] - d.entries[1][0]).abs() <= 1e-12 * d.norm());
        assert_eq!(d.eigenpairs()[0].1, Parity::None);
    }

    #[test]
    fn symmetric_decomposition() {
        let p = smoothed_max_profile(3.0, 0.3, SmoothingShape::Smoothstep).unwrap();
        let (hd, hn) = crate::profiles::halves(&p).unwrap();
        for k in 0..4 {
            let d = mode_dtn(&p, dim(4), k, 1024).unwrap();
            let pairs = d.eigenpairs();
            let even = pairs.iter().find(|x| x.1 == Parity::Even).unwrap().0;
            let odd = pairs.iter().find(|x| x.1 == Parity::Odd).unwrap().0;
            let sn = mixed_eigenvalue(&hn, dim(4), k, 512).unwrap();
            let sd = mixed_eigenvalue(&hd, dim(4), k, 512).unwrap();
            assert!((even - sn).abs() <= 1e-9 * sd.max(1.0), "k={k}: {even} vs {sn}");
            assert!((odd - sd).abs() <= 1e-9 * sd, "k={k}: {odd} vs {sd}");
        }
    }

    #[test]
    fn rejects_coarse_grid_and_invalid_profile() {
        let p = Profile::cylinder(1.0).unwrap();
        assert!(matches!(mode_dtn(&p, dim(3), 0, 8), Err(Error::Domain(_))));
        let bad = Profile::sampled_from(1.0, 16, |r| 1.0 + r).unwrap();
        assert!(matches!(mode_dtn(&bad, dim(3), 0, 64), Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn k_max_is_enforced() {
        let p = Profile::cylinder(1.0).unwrap();
        let cfg = SolverConfig {
            grid: 64,
            k_max: 1,
            margin: 2,
        };
        assert!(matches!(steklov_spectrum(&p, dim(3), 30, &cfg), Err(Error::Resource(_))));
    }

    #[test]
    fn annulus_half_matches_closed_forms() {
        let r = OuterRadius::new(2.0).unwrap();
        let hd = HalfProfile::annulus(2.0, crate::profiles::EndCondition::Dirichlet).unwrap();
        let hn = hd.with_condition(crate::profiles::EndCondition::Neumann);
        let sd = mixed_eigenvalue(&hd, dim(3), 0, 4096).unwrap();
        assert!((sd - sd_eigenvalue(dim(3), r, 0).unwrap()).abs() < 1e-6);
        let sn = mixed_eigenvalue(&hn, dim(3), 1, 4096).unwrap();
        assert!((sn - sn_eigenvalue(dim(3), r, 1).unwrap()).abs() < 1e-6);
        assert_eq!(mixed_eigenvalue(&hn, dim(3), 0, 64).unwrap(), 0.0);
    }
}
