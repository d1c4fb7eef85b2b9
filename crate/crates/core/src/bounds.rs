//! Sharp upper bounds, critical lengths and stability constants.
//!
//! All defining equations are solved in the outer-radius variable
//! `R = 1 + L/2`; powers of `R` are formed as `exp(e ln R)`.

use std::fmt;

use serde::Serialize;

use crate::annulus::{sd_eigenvalue, sn_eigenvalue, OuterRadius};
use crate::error::{domain, Error, Result};
use crate::modes::{multiplicity, Dim};
use crate::profiles::plateau_profile;
use crate::roots::brent;
use crate::solver::{sigma_extrapolated, SolverConfig};

/// Relative tolerance on `R` for all root solves.
pub const ROOT_RTOL: f64 = 1e-14;
/// Relative agreement required between independent routes to the same root.
pub const CROSS_CHECK_RTOL: f64 = 1e-10;
/// Relative distance to `L_1` below which the stability gap is undefined.
pub const L1_TOL: f64 = 1e-12;
/// Left end used when bracketing a direct eigenvalue crossing.
const CROSSING_LO: f64 = 1.0 + 1e-9;

/// Which closed form is active in a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    /// Steklov-Dirichlet eigenvalue of mode `k`.
    Dirichlet { k: usize },
    /// Steklov-Neumann eigenvalue of mode `k`.
    Neumann { k: usize },
    /// The constant `n - 1`.
    ConstantNMinus1,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Dirichlet { k } => write!(f, "dirichlet({k})"),
            Branch::Neumann { k } => write!(f, "neumann({k})"),
            Branch::ConstantNMinus1 => write!(f, "n-1"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub branch: Branch,
    /// Annulus radius `1 + L/2` the value was evaluated at, if any.
    pub outer_radius: Option<f64>,
}

/// Equation defining a critical length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Equation {
    /// `R^{2n-2} - (n-1) R^n - (n-1)^2 R^{n-2} + n - 1 = 0`.
    L1Polynomial,
    /// `4 R^{2n} - 2n R^{n+2} - n^2 R^{n-2} + 2n = 0`, i.e. `sigma_0^D = sigma_(2)^N`.
    L2Polynomial,
    /// `Psi_i(R) = 0`, i.e. `sigma_(i)^D = sigma_(i+1)^N`.
    Psi { i: usize },
    /// `sigma_0^D = n - 1`.
    DirichletMeetsNMinus1,
    /// `sigma_(2)^N = n - 1`.
    NeumannMeetsNMinus1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalLength {
    pub length: f64,
    pub equation: Equation,
    /// `|f(R)| / sum |terms of f(R)|`.
    pub residual: f64,
    /// Bracket on `L` used by the root finder; `None` for closed forms.
    pub bracket: Option<(f64, f64)>,
}

impl CriticalLength {
    pub fn outer_radius(&self) -> f64 {
        1.0 + 0.5 * self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityConstants {
    pub n: Dim,
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
}

fn pw(r: f64, e: f64) -> f64 {
    (e * r.ln()).exp()
}

fn radius(r: f64) -> Result<OuterRadius> {
    OuterRadius::new(r)
}

fn radius_of(length: f64) -> Result<f64> {
    Ok(OuterRadius::from_length(length)?.get())
}

fn sd(n: Dim, r: f64, k: usize) -> Result<f64> {
    sd_eigenvalue(n, radius(r)?, k)
}

fn sn(n: Dim, r: f64, k: usize) -> Result<f64> {
    sn_eigenvalue(n, radius(r)?, k)
}

/// A polynomial in `R` given as `(coefficient, exponent)` terms.
struct Terms(Vec<(f64, f64)>);

impl Terms {
    fn eval(&self, r: f64) -> f64 {
        self.0.iter().map(|&(c, e)| c * pw(r, e)).sum()
    }

    fn relative_residual(&self, r: f64) -> f64 {
        let scale: f64 = self.0.iter().map(|&(c, e)| (c * pw(r, e)).abs()).sum();
        self.eval(r).abs() / scale
    }
}

fn l1_terms(n: Dim) -> Terms {
    let n = n.as_f64();
    Terms(vec![
        (1.0, 2.0 * n - 2.0),
        (-(n - 1.0), n),
        (-(n - 1.0) * (n - 1.0), n - 2.0),
        (n - 1.0, 0.0),
    ])
}

fn l2_terms(n: Dim) -> Terms {
    let n = n.as_f64();
    Terms(vec![
        (4.0, 2.0 * n),
        (-2.0 * n, n + 2.0),
        (-n * n, n - 2.0),
        (2.0 * n, 0.0),
    ])
}

fn psi_terms(n: Dim, i: usize) -> Terms {
    let n = n.as_f64();
    let i = i as f64;
    let a = 2.0 * i + n;
    Terms(vec![
        (i + 1.0, 2.0 * a - 2.0),
        (-(i + 1.0) * (a - 1.0), a),
        (-(i + n - 1.0) * (a - 1.0), a - 2.0),
        (i + n - 1.0, 0.0),
    ])
}

fn solve_terms(terms: &Terms, lo: f64, hi: f64) -> Result<f64> {
    brent(|r| terms.eval(r), lo, hi, ROOT_RTOL * hi)
}

/// Root of `f(R) = a(R) - b(R)` on `[CROSSING_LO, hi]`.
fn crossing(mut f: impl FnMut(f64) -> Result<f64>, hi: f64) -> Result<f64> {
    let mut failure = None;
    let root = brent(
        |r| match f(r) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        CROSSING_LO,
        hi,
        ROOT_RTOL * hi,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

fn agree(a: f64, b: f64, what: &str) -> Result<()> {
    if (a - b).abs() > CROSS_CHECK_RTOL * a.abs() {
        return Err(Error::Internal(format!(
            "{what}: polynomial root {a} and direct crossing {b} disagree"
        )));
    }
    Ok(())
}

fn critical(r: f64, equation: Equation, terms: &Terms, bracket: (f64, f64)) -> CriticalLength {
    CriticalLength {
        length: 2.0 * (r - 1.0),
        equation,
        residual: terms.relative_residual(r),
        bracket: Some((2.0 * (bracket.0 - 1.0), 2.0 * (bracket.1 - 1.0))),
    }
}

/// `B_n(L) = min(sigma_0^D, sigma_(1)^N)` on `A_{1+L/2}`; ties go to the Neumann branch.
pub fn bound_sigma1(n: Dim, length: f64) -> Result<BoundValue> {
    let r = radius_of(length)?;
    let d = sd(n, r, 0)?;
    let nm = sn(n, r, 1)?;
    let (value, branch) = if d < nm {
        (d, Branch::Dirichlet { k: 0 })
    } else {
        (nm, Branch::Neumann { k: 1 })
    };
    Ok(BoundValue {
        value,
        branch,
        outer_radius: Some(r),
    })
}

/// `2 (exp(3 ln(n-1)/(n-2)) - 1)`, an upper bound for `L_1`.
pub fn l1_upper_bound(n: Dim) -> f64 {
    let n = n.as_f64();
    2.0 * ((3.0 * (n - 1.0).ln() / (n - 2.0)).exp() - 1.0)
}

/// `L_1` and `B_n = B_n(L_1)`, cross-checked against the direct crossing of the two branches.
pub fn critical_length_l1(n: Dim) -> Result<(CriticalLength, BoundValue)> {
    let terms = l1_terms(n);
    let hi = 1.0 + 0.5 * l1_upper_bound(n);
    let r = solve_terms(&terms, 1.0, hi)?;
    let direct = crossing(|r| Ok(sd(n, r, 0)? - sn(n, r, 1)?), hi)?;
    agree(r, direct, "L_1")?;
    let bound = BoundValue {
        value: sd(n, r, 0)?,
        branch: Branch::Dirichlet { k: 0 },
        outer_radius: Some(r),
    };
    Ok((critical(r, Equation::L1Polynomial, &terms, (1.0, hi)), bound))
}

/// `B_n^2(L) = ... = B_n^{m_1}(L) = sigma_(1)^N(A_{1+L/2})`.
pub fn bound_sigma2_to_m1(n: Dim, length: f64) -> Result<BoundValue> {
    let r = radius_of(length)?;
    Ok(BoundValue {
        value: sn(n, r, 1)?,
        branch: Branch::Neumann { k: 1 },
        outer_radius: Some(r),
    })
}

/// Limit `n - 1` of [`bound_sigma2_to_m1`] as `L -> infinity`.
pub fn sigma2_to_m1_limit(n: Dim) -> f64 {
    n.as_f64() - 1.0
}

/// `L_2`, where `sigma_0^D = sigma_(2)^N`, cross-checked against the direct crossing.
pub fn critical_length_l2(n: Dim) -> Result<CriticalLength> {
    let terms = l2_terms(n);
    let (l1, _) = critical_length_l1(n)?;
    let mut hi = l1.outer_radius();
    if terms.eval(hi) <= 0.0 {
        hi = 1.0 + 0.5 * l1_upper_bound(n);
    }
    let r = solve_terms(&terms, 1.0, hi)?;
    let direct = crossing(|r| Ok(sd(n, r, 0)? - sn(n, r, 2)?), hi)?;
    agree(r, direct, "L_2")?;
    Ok(critical(r, Equation::L2Polynomial, &terms, (1.0, hi)))
}

/// Piecewise bound on `sigma_{m_1+1}`: `sigma_(2)^N` up to `L_2`, then `sigma_0^D` up to `L_1`,
/// then `sigma_(1)^N`.
pub fn bound_m1_plus_1(n: Dim, length: f64) -> Result<BoundValue> {
    let l2 = critical_length_l2(n)?.length;
    let l1 = critical_length_l1(n)?.0.length;
    bound_m1_plus_1_with(n, length, l1, l2)
}

/// [`bound_m1_plus_1`] with precomputed `L_1` and `L_2`.
pub fn bound_m1_plus_1_with(n: Dim, length: f64, l1: f64, l2: f64) -> Result<BoundValue> {
    let r = radius_of(length)?;
    let (value, branch) = if length <= l2 {
        (sn(n, r, 2)?, Branch::Neumann { k: 2 })
    } else if length <= l1 {
        (sd(n, r, 0)?, Branch::Dirichlet { k: 0 })
    } else {
        (sn(n, r, 1)?, Branch::Neumann { k: 1 })
    };
    Ok(BoundValue {
        value,
        branch,
        outer_radius: Some(r),
    })
}

/// Closed forms `L_D` (`sigma_0^D = n-1`) and `L_N` (`sigma_(2)^N = n-1`), and the
/// branch of the global bound: Dirichlet when `L_N < L_D`, else `n - 1`.
pub fn appendix_comparator(n: Dim) -> Result<(CriticalLength, CriticalLength, Branch)> {
    let nf = n.as_f64();
    let rd = pw(nf - 1.0, 1.0 / (nf - 2.0));
    let rn = pw(0.5 * nf * (nf + 1.0), 1.0 / (nf + 2.0));
    let target = nf - 1.0;
    let ld = CriticalLength {
        length: 2.0 * (rd - 1.0),
        equation: Equation::DirichletMeetsNMinus1,
        residual: (sd(n, rd, 0)? - target).abs() / target,
        bracket: None,
    };
    let ln = CriticalLength {
        length: 2.0 * (rn - 1.0),
        equation: Equation::NeumannMeetsNMinus1,
        residual: (sn(n, rn, 2)? - target).abs() / target,
        bracket: None,
    };
    let branch = if ln.length < ld.length {
        Branch::Dirichlet { k: 0 }
    } else {
        Branch::ConstantNMinus1
    };
    Ok((ld, ln, branch))
}

/// `sup_L` of [`bound_m1_plus_1`]: `max(sigma_0^D(A_{1+L_2/2}), n - 1)`.
pub fn bound_m1_plus_1_global(n: Dim) -> Result<BoundValue> {
    let (_, _, branch) = appendix_comparator(n)?;
    Ok(match branch {
        Branch::Dirichlet { .. } => {
            let r = critical_length_l2(n)?.outer_radius();
            BoundValue {
                value: sd(n, r, 0)?,
                branch,
                outer_radius: Some(r),
            }
        }
        _ => BoundValue {
            value: n.as_f64() - 1.0,
            branch,
            outer_radius: None,
        },
    })
}

/// `2 (exp(2 ln(2i+n)/(2i+n-2)) - 1)`, an upper bound for `L_i*`.
pub fn li_star_upper_bound(n: Dim, i: usize) -> f64 {
    let a = 2.0 * i as f64 + n.as_f64();
    2.0 * ((2.0 * a.ln() / (a - 2.0)).exp() - 1.0)
}

/// `L_i*`, the root of `Psi_i`, cross-checked against `sigma_(i)^D = sigma_(i+1)^N`.
///
/// This is an upper bound for the critical length `L_i`, not `L_i` itself.
pub fn critical_length_li_star(n: Dim, i: usize) -> Result<CriticalLength> {
    if i == 0 {
        return domain("L_i* is defined for i >= 1");
    }
    let terms = psi_terms(n, i);
    let hi = 1.0 + 0.5 * li_star_upper_bound(n, i);
    let r = solve_terms(&terms, 1.0, hi)?;
    let direct = crossing(|r| Ok(sd(n, r, i)? - sn(n, r, i + 1)?), hi)?;
    agree(r, direct, "L_i*")?;
    Ok(critical(r, Equation::Psi { i }, &terms, (1.0, hi)))
}

/// `[k_1, ..., k_{i_max}]` with `k_1 = 1` and `k_i = 1 + sum_{j<=i} 2 m_j`.
pub fn k_sequence(n: Dim, i_max: usize) -> Result<Vec<u64>> {
    if i_max == 0 {
        return domain("i_max must be at least 1");
    }
    let mut out = vec![1u64];
    let mut acc = 1u64;
    let overflow = || Error::Overflow(format!("k_i for n={n}"));
    for j in 1..=i_max {
        let m = multiplicity(n, j)?;
        acc = m
            .checked_mul(2)
            .and_then(|v| v.checked_add(acc))
            .ok_or_else(overflow)?;
        if j >= 2 {
            out.push(acc);
        }
    }
    Ok(out)
}

/// `C_1(n)`, `C_2(n)` and `C(n) = 2 max(C_1, C_2)`.
pub fn stability_constants(n: Dim) -> Result<StabilityConstants> {
    let b = critical_length_l1(n)?.1.value;
    let nf = n.as_f64();
    let lo = b - (nf - 2.0);
    let hi = nf - 1.0 - b;
    if !(lo > 0.0 && hi > 0.0) {
        return Err(Error::Internal(format!("B_n = {b} outside (n-2, n-1)")));
    }
    let c1 = 2.0 / (lo * lo) / (b / lo).powf((nf - 3.0) / (nf - 2.0));
    let c2 = (nf - 2.0).powi(2) / (hi * hi) / (nf * (((nf - 1.0) * b + 1.0) / hi).powf(1.0 / nf));
    Ok(StabilityConstants {
        n,
        c1,
        c2,
        c: 2.0 * c1.max(c2),
    })
}

/// `C(n, L) = B_n - B_n(L)`.
pub fn stability_gap_cnl(n: Dim, length: f64) -> Result<f64> {
    let (l1, b) = critical_length_l1(n)?;
    if (length - l1.length).abs() <= L1_TOL * l1.length {
        return domain(format!("L = {length} coincides with L_1; the gap vanishes there"));
    }
    Ok(b.value - bound_sigma1(n, length)?.value)
}

/// `C(n, L, m) = B_n(L) - sigma_1` of the smoothed plateau metric.
///
/// `sigma_1` is extrapolated from grids `N` and `N/2`.
pub fn stability_gap_cnlm(n: Dim, length: f64, m: f64, delta: f64, cfg: &SolverConfig) -> Result<f64> {
    let p = plateau_profile(length, m, delta)?;
    let sigma1 = sigma_extrapolated(&p, n, 1, cfg)?.value;
    let gap = bound_sigma1(n, length)?.value - sigma1;
    if !(gap > 0.0) {
        return Err(Error::Resolution(format!(
            "gap {gap} is not positive at grid {}",
            cfg.grid
        )));
    }
    Ok(gap)
}
