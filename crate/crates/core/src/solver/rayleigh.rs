//! Mode test functions and their Rayleigh quotients.

use serde::Serialize;

use super::fem::energy;
use super::{dtn_with_extensions, DtnMatrix};
use crate::error::{domain, Result};
use crate::modes::Dim;
use crate::profiles::{EndCondition, Profile};

/// Piecewise-linear radial function on a grid, attached to mode `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub k: usize,
    /// Condition at the far end when the function lives on a half profile.
    pub end_condition: Option<EndCondition>,
}

impl ModeFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, k: usize) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return domain("mode function needs matching node and value lists of length >= 2");
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return domain("mode function nodes must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("mode function values must be finite");
        }
        if values.iter().all(|&v| v == 0.0) {
            return domain("mode function is identically zero");
        }
        Ok(ModeFunction {
            nodes,
            values,
            k,
            end_condition: None,
        })
    }

    /// Samples `f` on `nodes`.
    pub fn from_fn(nodes: Vec<f64>, k: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = nodes.iter().map(|&r| f(r)).collect();
        ModeFunction::new(nodes, values, k)
    }
}

/// `[int u'^2 h^{n-1} + lambda_k u^2 h^{n-3}] / [u(0)^2 + u(L)^2]`.
///
/// Integrals use the same quadrature as the solver on the nodes of `u`.
/// Returns `None` when the boundary trace vanishes (the quotient is infinite).
pub fn rayleigh_quotient(p: &Profile, n: Dim, u: &ModeFunction) -> Result<Option<f64>> {
    let length = p.length();
    let first = u.nodes[0];
    let last = *u.nodes.last().unwrap();
    let tol = 1e-12 * length.max(1.0);
    if first.abs() > tol || (last - length).abs() > tol {
        return domain("mode function must be sampled on [0, L]");
    }
    let denom = u.values[0].powi(2) + u.values.last().unwrap().powi(2);
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some(energy(p.warp(), &u.nodes, n, u.k, &u.values) / denom))
}

/// Full-interval function `f(r) = +-f(L - r)` from a half-profile solution.
///
/// Odd reflection needs a Dirichlet solution, even reflection a Neumann one.
pub fn reflect_test_function(half: &ModeFunction, odd: bool) -> Result<ModeFunction> {
    let want = if odd {
        EndCondition::Dirichlet
    } else {
        EndCondition::Neumann
    };
    if half.end_condition != Some(want) {
        return domain(format!(
            "{} reflection requires a {want:?} solution",
            if odd { "odd" } else { "even" }
        ));
    }
    let c = *half.nodes.last().unwrap();
    let length = 2.0 * c;
    let sign = if odd { -1.0 } else { 1.0 };
    let m = half.nodes.len() - 1;
    let mut nodes = half.nodes.clone();
    let mut values = half.values.clone();
    if odd {
        values[m] = 0.0;
    }
    for i in (0..m).rev() {
        nodes.push(length - half.nodes[i]);
        values.push(sign * half.values[i]);
    }
    Ok(ModeFunction {
        nodes,
        values,
        k: half.k,
        end_condition: None,
    })
}

/// DtN matrix of mode `k` and the discrete eigenfunction of eigenvalue index `which` (0 or 1).
pub fn dtn_eigenfunction(p: &Profile, n: Dim, k: usize, grid: usize, which: usize) -> Result<(DtnMatrix, f64, ModeFunction)> {
    if which > 1 {
        return domain("a mode has exactly two Steklov eigenvalues");
    }
    let (sys, dtn, ext) = dtn_with_extensions(p, n, k, grid)?;
    let sigma = dtn.eigenvalues()[which];
    let m = sys.cells();
    if k == 0 && which == 0 {
        let u = ModeFunction::new(sys.nodes, vec![1.0; m + 1], k)?;
        return Ok((dtn, sigma, u));
    }
    let [b0, b1] = dtn.eigenvector(sigma);
    let values = (0..=m).map(|i| b0 * ext.left[i] + b1 * ext.right[i]).collect();
    Ok((
        dtn,
        sigma,
        ModeFunction {
            nodes: sys.nodes,
            values,
            k,
            end_condition: None,
        },
    ))
}
