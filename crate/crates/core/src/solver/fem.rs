//! Piecewise-linear assembly of the per-mode radial operator and its
//! condensation onto boundary nodes.
//!
//! Interior nodes are eliminated one element at a time. Writing the element
//! matrix as `s [[1, -1], [-1, 1]] + [[ml, mo], [mo, mr]]`, the boundary
//! stiffness seen from node `j` obeys
//! `D_j = ml + (s (mr + D_{j+1} + 2 mo) - mo^2) / (s + mr + D_{j+1})`,
//! a sum of positive terms, so no cancellation occurs however fine the grid.

use serde::Serialize;

use crate::modes::{laplace_eigenvalue, Dim};
use crate::profiles::Warp;

const GAUSS: f64 = 0.288_675_134_594_812_9; // 1 / (2 sqrt 3)

/// Element coefficients of `int h^{n-1} u'v' + lambda int h^{n-3} u v` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSystem {
    pub nodes: Vec<f64>,
    /// Per element: `s` (stiffness) and the mass entries `ml`, `mr`, `mo`.
    pub stiffness: Vec<f64>,
    pub mass_left: Vec<f64>,
    pub mass_right: Vec<f64>,
    pub mass_off: Vec<f64>,
    pub k: usize,
    pub lambda: f64,
}

/// `[s, ml, mr, mo]` of one element.
fn element(warp: &Warp, a: f64, b: f64, n: i32, lambda: f64) -> [f64; 4] {
    let w = b - a;
    let mid = 0.5 * (a + b);
    let mut stiff = 0.0;
    let mut m = [0.0; 3];
    for s in [-1.0, 1.0] {
        let h = warp.eval(mid + s * GAUSS * w);
        stiff += h.powi(n - 1);
        let g = h.powi(n - 3);
        let pl = 0.5 - s * GAUSS;
        let pr = 0.5 + s * GAUSS;
        m[0] += g * pl * pl;
        m[1] += g * pr * pr;
        m[2] += g * pl * pr;
    }
    let c = 0.5 * w * lambda;
    [0.5 * stiff / w, c * m[0], c * m[1], c * m[2]]
}

/// Boundary state at the far end of a condensation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Far {
    /// `u = 0` at the far node.
    Pinned,
    /// Natural condition: nothing beyond the far node.
    Free,
}

impl ModeSystem {
    pub(crate) fn assemble(warp: &Warp, nodes: Vec<f64>, n: Dim, k: usize) -> Self {
        let lambda = laplace_eigenvalue(n, k);
        let e = n.get() as i32;
        let cells = nodes.len() - 1;
        let mut sys = ModeSystem {
            nodes: Vec::new(),
            stiffness: Vec::with_capacity(cells),
            mass_left: Vec::with_capacity(cells),
            mass_right: Vec::with_capacity(cells),
            mass_off: Vec::with_capacity(cells),
            k,
            lambda,
        };
        for i in 0..cells {
            let [s, ml, mr, mo] = element(warp, nodes[i], nodes[i + 1], e, lambda);
            sys.stiffness.push(s);
            sys.mass_left.push(ml);
            sys.mass_right.push(mr);
            sys.mass_off.push(mo);
        }
        sys.nodes = nodes;
        sys
    }

    /// Assembles on `half` nodes of `[0, L/2]` and mirrors, so the result is exactly symmetric.
    pub(crate) fn assemble_mirrored(warp: &Warp, half: &[f64], length: f64, n: Dim, k: usize) -> Self {
        let mut sys = ModeSystem::assemble(warp, half.to_vec(), n, k);
        let m = sys.cells();
        for i in (0..m).rev() {
            sys.stiffness.push(sys.stiffness[i]);
            let (ml, mr) = (sys.mass_left[i], sys.mass_right[i]);
            sys.mass_left.push(mr);
            sys.mass_right.push(ml);
            sys.mass_off.push(sys.mass_off[i]);
        }
        sys.nodes = super::grid::mirror_grid(half, length);
        sys
    }

    pub fn cells(&self) -> usize {
        self.stiffness.len()
    }

    /// Diagonal of the assembled tridiagonal matrix.
    pub fn diag(&self) -> Vec<f64> {
        let m = self.cells();
        let mut d = vec![0.0; m + 1];
        for i in 0..m {
            d[i] += self.stiffness[i] + self.mass_left[i];
            d[i + 1] += self.stiffness[i] + self.mass_right[i];
        }
        d
    }

    /// Off-diagonal; entry `i` couples nodes `i` and `i + 1`.
    pub fn off(&self) -> Vec<f64> {
        (0..self.cells()).map(|i| self.mass_off[i] - self.stiffness[i]).collect()
    }

    /// `D_j` for every node: boundary stiffness of `[r_j, r_end]` with the given far condition.
    ///
    /// A pinned far node yields `D_end = +inf`.
    pub(crate) fn sweep_from_right(&self, far: Far) -> Vec<f64> {
        let m = self.cells();
        let mut d = vec![0.0; m + 1];
        d[m] = match far {
            Far::Pinned => f64::INFINITY,
            Far::Free => 0.0,
        };
        for j in (0..m).rev() {
            let (s, ml, mr, mo) = (self.stiffness[j], self.mass_left[j], self.mass_right[j], self.mass_off[j]);
            let next = d[j + 1];
            d[j] = if next.is_infinite() {
                ml + s
            } else {
                ml + (s * (mr + next + 2.0 * mo) - mo * mo) / (s + mr + next)
            };
        }
        d
    }

    /// Mirror image of [`sweep_from_right`](Self::sweep_from_right): `E_j` looks towards `r = 0`.
    pub(crate) fn sweep_from_left(&self, far: Far) -> Vec<f64> {
        let m = self.cells();
        let mut e = vec![0.0; m + 1];
        e[0] = match far {
            Far::Pinned => f64::INFINITY,
            Far::Free => 0.0,
        };
        for j in 0..m {
            let (s, ml, mr, mo) = (self.stiffness[j], self.mass_left[j], self.mass_right[j], self.mass_off[j]);
            let prev = e[j];
            e[j + 1] = if prev.is_infinite() {
                mr + s
            } else {
                mr + (s * (ml + prev + 2.0 * mo) - mo * mo) / (s + ml + prev)
            };
        }
        e
    }

    /// Discrete harmonic extension of `u_0 = 1` given a right sweep.
    pub(crate) fn extend_from_left(&self, d: &[f64]) -> Vec<f64> {
        let m = self.cells();
        let mut u = vec![0.0; m + 1];
        u[0] = 1.0;
        for j in 0..m {
            u[j + 1] = if d[j + 1].is_infinite() {
                0.0
            } else {
                u[j] * (self.stiffness[j] - self.mass_off[j])
                    / (self.stiffness[j] + self.mass_right[j] + d[j + 1])
            };
        }
        u
    }

    /// Discrete harmonic extension of `u_end = 1` given a left sweep.
    pub(crate) fn extend_from_right(&self, e: &[f64]) -> Vec<f64> {
        let m = self.cells();
        let mut u = vec![0.0; m + 1];
        u[m] = 1.0;
        for j in (0..m).rev() {
            u[j] = if e[j].is_infinite() {
                0.0
            } else {
                u[j + 1] * (self.stiffness[j] - self.mass_off[j])
                    / (self.stiffness[j] + self.mass_left[j] + e[j])
            };
        }
        u
    }
}

/// `int h^{n-1} u'^2 + lambda h^{n-3} u^2` for piecewise-linear `u`, summed per element.
///
/// Element sums avoid the cancellation of the assembled quadratic form.
pub(crate) fn energy(warp: &Warp, nodes: &[f64], n: Dim, k: usize, u: &[f64]) -> f64 {
    let lambda = laplace_eigenvalue(n, k);
    let e = n.get() as i32;
    let mut total = 0.0;
    for i in 0..nodes.len() - 1 {
        let [s, ml, mr, mo] = element(warp, nodes[i], nodes[i + 1], e, lambda);
        let (a, b) = (u[i], u[i + 1]);
        total += s * (b - a) * (b - a) + ml * a * a + mr * b * b + 2.0 * mo * a * b;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Segment;

    fn ramp() -> Warp {
        Warp::Segments(vec![Segment::Linear {
            start: 0.0,
            end: 1.0,
            h_start: 1.0,
            slope: 1.0,
        }])
    }

    fn nodes(m: usize) -> Vec<f64> {
        (0..=m).map(|i| i as f64 / m as f64).collect()
    }

    #[test]
    fn constants_are_in_the_kernel_for_mode_zero() {
        let ones = vec![1.0; 9];
        assert_eq!(energy(&ramp(), &nodes(8), Dim::new(3).unwrap(), 0, &ones), 0.0);
        let s = ModeSystem::assemble(&ramp(), nodes(8), Dim::new(3).unwrap(), 0);
        let (d, o) = (s.diag(), s.off());
        for i in 0..9 {
            let row = d[i] + if i > 0 { o[i - 1] } else { 0.0 } + if i < 8 { o[i] } else { 0.0 };
            assert!(row.abs() < 1e-12);
        }
        assert_eq!(s.sweep_from_right(Far::Free)[0], 0.0);
    }

    #[test]
    fn sweep_matches_dense_schur_complement() {
        // Small system: compare D_0 with the Schur complement by Gaussian elimination.
        let s = ModeSystem::assemble(&ramp(), nodes(5), Dim::new(4).unwrap(), 2);
        let (d, o) = (s.diag(), s.off());
        let mut a = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            a[i][i] = d[i];
            if i < 5 {
                a[i][i + 1] = o[i];
                a[i + 1][i] = o[i];
            }
        }
        // Eliminate nodes 5 down to 1 (free far end).
        for j in (1..6).rev() {
            for i in 0..j {
                let f = a[i][j] / a[j][j];
                for c in 0..j {
                    a[i][c] -= f * a[j][c];
                }
            }
        }
        let sweep = s.sweep_from_right(Far::Free)[0];
        assert!((sweep - a[0][0]).abs() < 1e-12 * a[0][0]);
    }
}
