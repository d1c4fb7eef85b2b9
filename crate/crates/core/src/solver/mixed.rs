//! Mixed Steklov-Dirichlet and Steklov-Neumann problems on half profiles.

use super::fem::{Far, ModeSystem};
use super::{check_grid, grid, ModeFunction};
use crate::error::{Error, Result};
use crate::modes::Dim;
use crate::profiles::{EndCondition, HalfProfile};

fn half_system(hp: &HalfProfile, n: Dim, k: usize, cells: usize) -> Result<ModeSystem> {
    check_grid(cells)?;
    let report = hp.validate();
    if !report.is_valid() {
        return Err(Error::InvalidProfile(report));
    }
    let nodes = grid::fit_grid(&hp.breakpoints(), hp.half_length(), cells);
    Ok(ModeSystem::assemble(hp.warp(), nodes, n, k))
}

fn far(condition: EndCondition) -> Far {
    match condition {
        EndCondition::Dirichlet => Far::Pinned,
        EndCondition::Neumann => Far::Free,
    }
}

/// The mode-`k` eigenvalue of the mixed problem with Steklov data at `r = 0`.
///
/// The Neumann problem has eigenvalue 0 for `k = 0` (constants).
pub fn mixed_eigenvalue(hp: &HalfProfile, n: Dim, k: usize, grid: usize) -> Result<f64> {
    let sys = half_system(hp, n, k, grid)?;
    Ok(sys.sweep_from_right(far(hp.condition()))[0])
}

/// Eigenvalue and discrete eigenfunction normalized by `u(0) = 1`.
pub fn mixed_eigenfunction(hp: &HalfProfile, n: Dim, k: usize, grid: usize) -> Result<(f64, ModeFunction)> {
    let sys = half_system(hp, n, k, grid)?;
    let d = sys.sweep_from_right(far(hp.condition()));
    let values = sys.extend_from_left(&d);
    Ok((
        d[0],
        ModeFunction {
            nodes: sys.nodes,
            values,
            k,
            end_condition: Some(hp.condition()),
        },
    ))
}
