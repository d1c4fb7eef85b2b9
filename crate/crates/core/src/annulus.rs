//! Mixed Steklov problems on the Euclidean annulus `1 < |x| < R`.
//!
//! Steklov condition on the inner sphere; Dirichlet or Neumann on the
//! outer one. Eigenvalues and radial eigenfunctions are closed forms in
//! `P = R^(2k+n-2)`, evaluated through `q = 1/P = exp(-(2k+n-2) ln R)`
//! so that neither large `k` nor large `R` overflows.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::modes::{laplace_eigenvalue, multiplicity, Dim};
use crate::spectrum::{Parity, Spectrum, SpectrumEntry};

/// Smallest admissible `R - 1`.
pub const MIN_WIDTH: f64 = 1e-12;

/// Outer radius of an annulus with inner radius 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct OuterRadius(f64);

impl OuterRadius {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 1.0 {
            return domain(format!("outer radius must be finite and > 1, got {r}"));
        }
        if r - 1.0 < MIN_WIDTH {
            return Err(Error::IllConditioned(format!(
                "outer radius {r} is within {MIN_WIDTH:e} of the inner radius"
            )));
        }
        Ok(OuterRadius(r))
    }

    /// The annulus modelling half of a meridian of length `L`: `R = 1 + L/2`.
    pub fn from_length(length: f64) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return domain(format!("meridian length must be positive, got {length}"));
        }
        OuterRadius::new(1.0 + 0.5 * length)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Outer boundary condition of a mixed problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedKind {
    Dirichlet,
    Neumann,
}

/// `(q, 1 - q)` with `q = R^-(2k+n-2)`, both accurate near `R = 1`.
fn inverse_power(n: Dim, r: OuterRadius, k: usize) -> (f64, f64) {
    let e = (2 * k) as f64 + n.as_f64() - 2.0;
    let x = -e * r.get().ln();
    (x.exp(), -x.exp_m1())
}

fn checked(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::IllConditioned(format!("{what} is not finite")))
    }
}

/// Steklov-Dirichlet eigenvalue of mode `k`: `((k+n-2) P + k) / (P - 1)`.
pub fn sd_eigenvalue(n: Dim, r: OuterRadius, k: usize) -> Result<f64> {
    let (q, one_minus_q) = inverse_power(n, r, k);
    if one_minus_q <= 0.0 {
        return Err(Error::IllConditioned("R^(2k+n-2) - 1 underflows".into()));
    }
    let kf = k as f64;
    checked(((kf + n.as_f64() - 2.0) + kf * q) / one_minus_q, "sigma^D")
}

/// Steklov-Neumann eigenvalue of mode `k`: `k (k+n-2) (P - 1) / (k P + k + n - 2)`.
pub fn sn_eigenvalue(n: Dim, r: OuterRadius, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let (q, one_minus_q) = inverse_power(n, r, k);
    let kf = k as f64;
    let c = kf + n.as_f64() - 2.0;
    checked(kf * c * one_minus_q / (kf + c * q), "sigma^N")
}

pub fn mixed_eigenvalue(n: Dim, r: OuterRadius, k: usize, kind: MixedKind) -> Result<f64> {
    match kind {
        MixedKind::Dirichlet => sd_eigenvalue(n, r, k),
        MixedKind::Neumann => sn_eigenvalue(n, r, k),
    }
}

/// Radial factor `a s^k + b s^-(k+n-2)` of a mode-`k` harmonic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialFunction {
    pub a: f64,
    pub b: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub n: Dim,
    pub k: usize,
}

impl RadialFunction {
    fn new(n: Dim, k: usize, a: f64, b: f64) -> Self {
        let kf = k as f64;
        RadialFunction {
            a,
            b,
            p_plus: kf,
            p_minus: -(kf + n.as_f64() - 2.0),
            n,
            k,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.a * s.powf(self.p_plus) + self.b * s.powf(self.p_minus)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let (p, m) = (self.p_plus, self.p_minus);
        let plus = if p == 0.0 { 0.0 } else { self.a * p * s.powf(p - 1.0) };
        plus + self.b * m * s.powf(m - 1.0)
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        let (p, m) = (self.p_plus, self.p_minus);
        let plus = if p == 0.0 || p == 1.0 {
            0.0
        } else {
            self.a * p * (p - 1.0) * s.powf(p - 2.0)
        };
        plus + self.b * m * (m - 1.0) * s.powf(m - 2.0)
    }

    /// Residual of `f'' + (n-1)/s f' - k(k+n-2)/s^2 f` at `s`.
    pub fn ode_residual(&self, s: f64) -> f64 {
        let lambda = laplace_eigenvalue(self.n, self.k);
        self.second_derivative(s) + (self.n.as_f64() - 1.0) / s * self.derivative(s)
            - lambda / (s * s) * self.value(s)
    }

    /// `-f'(1)/f(1)`: the inner sphere's outward normal points toward smaller radius.
    pub fn steklov_ratio(&self) -> f64 {
        -self.derivative(1.0) / self.value(1.0)
    }
}

/// Steklov-Dirichlet radial eigenfunction, `alpha(R) = 0`, `alpha(1) = 1`.
pub fn sd_radial_profile(n: Dim, r: OuterRadius, k: usize) -> Result<RadialFunction> {
    let (q, one_minus_q) = inverse_power(n, r, k);
    if one_minus_q <= 0.0 {
        return Err(Error::IllConditioned("R^(2k+n-2) - 1 underflows".into()));
    }
    // b = -a P and a + b = 1.
    Ok(RadialFunction::new(n, k, -q / one_minus_q, 1.0 / one_minus_q))
}

/// Steklov-Neumann radial eigenfunction, `beta'(R) = 0`, `beta(1) = 1`.
pub fn sn_radial_profile(n: Dim, r: OuterRadius, k: usize) -> Result<RadialFunction> {
    if k == 0 {
        return Ok(RadialFunction::new(n, 0, 1.0, 0.0));
    }
    let (q, _) = inverse_power(n, r, k);
    let kf = k as f64;
    let c = kf + n.as_f64() - 2.0;
    // b = a k P / (k+n-2) and a + b = 1.
    let denom = c * q + kf;
    Ok(RadialFunction::new(n, k, c * q / denom, kf / denom))
}

/// The first `count` mixed eigenvalues with multiplicity, tagged by mode.
pub fn mixed_spectrum(n: Dim, r: OuterRadius, kind: MixedKind, count: usize) -> Result<Spectrum> {
    if count == 0 {
        return domain("count must be >= 1");
    }
    let mut entries = Vec::new();
    let mut covered = 0u64;
    let mut k = 0;
    while covered < count as u64 {
        let mult = multiplicity(n, k)?;
        entries.push(SpectrumEntry {
            sigma: mixed_eigenvalue(n, r, k, kind)?,
            mode: k,
            parity: Parity::None,
            mult,
        });
        covered += mult;
        k += 1;
    }
    Ok(Spectrum::from_entries(entries, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dim(n: u32) -> Dim {
        Dim::new(n).unwrap()
    }
    fn rad(r: f64) -> OuterRadius {
        OuterRadius::new(r).unwrap()
    }

    #[test]
    fn dirichlet_examples() {
        assert_relative_eq!(sd_eigenvalue(dim(3), rad(2.0), 0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sd_eigenvalue(dim(3), rad(2.0), 1).unwrap(), 17.0 / 7.0, max_relative = 1e-15);
        for n in 3..9 {
            let v = sd_eigenvalue(dim(n), rad(1e8), 0).unwrap();
            assert!((v - (n as f64 - 2.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn neumann_examples() {
        assert_eq!(sn_eigenvalue(dim(4), rad(3.0), 0).unwrap(), 0.0);
        assert_relative_eq!(sn_eigenvalue(dim(3), rad(2.0), 1).unwrap(), 1.4, max_relative = 1e-15);
        assert_relative_eq!(sn_eigenvalue(dim(3), rad(2.0), 2).unwrap(), 186.0 / 67.0, max_relative = 1e-15);
    }

    #[test]
    fn neumann_limit_is_n_minus_one() {
        for n in 3..9 {
            let v = sn_eigenvalue(dim(n), rad(1e6), 1).unwrap();
            assert!((v - (n as f64 - 1.0)).abs() < 1e-5);
        }
    }

    #[test]
    fn radius_guards() {
        assert!(matches!(OuterRadius::new(1.0), Err(Error::Domain(_))));
        assert!(matches!(OuterRadius::new(0.5), Err(Error::Domain(_))));
        assert!(matches!(OuterRadius::new(1.0 + 1e-14), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn huge_modes_do_not_overflow() {
        let v = sd_eigenvalue(dim(5), rad(50.0), 400).unwrap();
        assert_relative_eq!(v, 403.0, max_relative = 1e-12);
        let v = sn_eigenvalue(dim(5), rad(50.0), 400).unwrap();
        assert_relative_eq!(v, 403.0, max_relative = 1e-12);
    }

    #[test]
    fn dirichlet_profile_examples() {
        let f = sd_radial_profile(dim(3), rad(2.0), 0).unwrap();
        assert_relative_eq!(f.a, -1.0, max_relative = 1e-14);
        assert_relative_eq!(f.b, 2.0, max_relative = 1e-14);
        assert!(f.value(2.0).abs() < 1e-15);
        assert_relative_eq!(f.steklov_ratio(), 2.0, max_relative = 1e-14);

        let f = sd_radial_profile(dim(3), rad(2.0), 1).unwrap();
        assert_relative_eq!(f.a, -1.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(f.b, 8.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(f.value(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(-f.derivative(1.0), 17.0 / 7.0, max_relative = 1e-14);
    }

    #[test]
    fn neumann_profile_examples() {
        let f = sn_radial_profile(dim(3), rad(2.0), 0).unwrap();
        assert_eq!(f.value(1.7), 1.0);
        assert_eq!(f.derivative(1.3), 0.0);

        let f = sn_radial_profile(dim(3), rad(2.0), 1).unwrap();
        assert_relative_eq!(f.b / f.a, 4.0, max_relative = 1e-14);
        assert_relative_eq!(f.steklov_ratio(), 1.4, max_relative = 1e-14);
        assert!(f.derivative(2.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_spectrum_examples() {
        let s = mixed_spectrum(dim(3), rad(2.0), MixedKind::Neumann, 1).unwrap();
        assert_eq!(s.values(), vec![0.0]);
        let s = mixed_spectrum(dim(3), rad(2.0), MixedKind::Neumann, 4).unwrap();
        let v = s.values();
        assert_eq!(v[0], 0.0);
        for x in &v[1..] {
            assert_relative_eq!(*x, 1.4, max_relative = 1e-14);
        }
        assert!(s.entries().iter().all(|e| e.mode <= 1));
        let s = mixed_spectrum(dim(3), rad(2.0), MixedKind::Dirichlet, 1).unwrap();
        assert_relative_eq!(s.values()[0], 2.0, max_relative = 1e-15);
    }
}
