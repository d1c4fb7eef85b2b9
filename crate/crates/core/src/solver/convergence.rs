//! Grid refinement studies with Richardson extrapolation.

use serde::Serialize;

use super::{mixed_eigenvalue, mode_dtn};
use crate::error::{domain, Result};
use crate::modes::Dim;
use crate::profiles::{HalfProfile, Profile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub grid: usize,
    pub eigenvalues: Vec<f64>,
}

/// Eigenvalues per grid, with the observed order and extrapolated limit per eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Observed order from the last three grids; `NaN` when differences vanish.
    pub order: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

/// Order and limit from values on three grids refined by the constant ratio `ratio`.
pub fn richardson(f1: f64, f2: f64, f3: f64, ratio: f64) -> (f64, f64) {
    let d1 = f1 - f2;
    let d2 = f2 - f3;
    if d2 == 0.0 || d1 == 0.0 || d1.signum() != d2.signum() {
        return (f64::NAN, f3);
    }
    let order = (d1 / d2).ln() / ratio.ln();
    let factor = ratio.powf(order) - 1.0;
    (order, f3 - d2 / factor)
}

fn check_list(grids: &[usize]) -> Result<()> {
    if grids.len() < 3 {
        return domain("a convergence study needs at least three grids");
    }
    if !grids.windows(2).all(|w| w[1] > w[0]) {
        return domain("grid sizes must be strictly increasing");
    }
    Ok(())
}

fn tabulate(grids: &[usize], rows: Vec<ConvergenceRow>) -> ConvergenceTable {
    let l = grids.len();
    let ratio = grids[l - 1] as f64 / grids[l - 2] as f64;
    let width = rows[0].eigenvalues.len();
    let (order, extrapolated) = (0..width)
        .map(|j| {
            richardson(
                rows[l - 3].eigenvalues[j],
                rows[l - 2].eigenvalues[j],
                rows[l - 1].eigenvalues[j],
                ratio,
            )
        })
        .unzip();
    ConvergenceTable {
        rows,
        order,
        extrapolated,
    }
}

/// Both DtN eigenvalues of mode `k` on each grid.
pub fn convergence_study(p: &Profile, n: Dim, k: usize, grids: &[usize]) -> Result<ConvergenceTable> {
    check_list(grids)?;
    let rows = grids
        .iter()
        .map(|&g| {
            Ok(ConvergenceRow {
                grid: g,
                eigenvalues: mode_dtn(p, n, k, g)?.eigenvalues().to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tabulate(grids, rows))
}

/// The mixed eigenvalue of mode `k` on each grid.
pub fn mixed_convergence_study(hp: &HalfProfile, n: Dim, k: usize, grids: &[usize]) -> Result<ConvergenceTable> {
    check_list(grids)?;
    let rows = grids
        .iter()
        .map(|&g| {
            Ok(ConvergenceRow {
                grid: g,
                eigenvalues: vec![mixed_eigenvalue(hp, n, k, g)?],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tabulate(grids, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{degenerate_profile, halves, EndCondition};

    fn dim(n: u32) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn cylinder_order_two() {
        let p = Profile::cylinder(2.0).unwrap();
        let s = 2f64.sqrt();
        let exact = [s * s.tanh(), s / s.tanh()];
        let t = convergence_study(&p, dim(3), 1, &[64, 128, 256, 512]).unwrap();
        for j in 0..2 {
            let err: Vec<f64> = t.rows.iter().map(|r| (r.eigenvalues[j] - exact[j]).abs()).collect();
            for w in err.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
            }
            assert!((t.order[j] - 2.0).abs() < 0.05);
        }
    }

    #[test]
    fn half_annulus_extrapolates() {
        let hp = HalfProfile::annulus(2.0, EndCondition::Dirichlet).unwrap();
        let t = mixed_convergence_study(&hp, dim(3), 0, &[256, 512, 1024, 2048]).unwrap();
        assert!((t.extrapolated[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_extrapolates() {
        let p = degenerate_profile(2.0).unwrap();
        let (_, hn) = halves(&p).unwrap();
        let t = mixed_convergence_study(&hn, dim(3), 1, &[256, 512, 1024]).unwrap();
        assert!((t.extrapolated[0] - 1.4).abs() < 1e-6);
        let t = convergence_study(&p, dim(3), 1, &[256, 512, 1024]).unwrap();
        assert!((t.extrapolated[0] - 1.4).abs() < 1e-6);
    }

    #[test]
    fn rejects_short_lists() {
        let p = Profile::cylinder(1.0).unwrap();
        assert!(convergence_study(&p, dim(3), 0, &[64, 128]).is_err());
        assert!(convergence_study(&p, dim(3), 0, &[64, 64, 128]).is_err());
    }
}
