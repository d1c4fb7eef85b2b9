//! Spherical-harmonic channels on the unit (n-1)-sphere.
//!
//! Every per-mode computation is indexed by a degree `k`, the Laplace
//! eigenvalue `k(n+k-2)` and its multiplicity. The harmonics themselves
//! are never evaluated.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Default cap on the mode index.
pub const DEFAULT_K_MAX: usize = 128;

/// Manifold dimension `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Dim(u32);

impl Dim {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return domain(format!("dimension must satisfy n >= 3, got {n}"));
        }
        Ok(Dim(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One spherical-harmonic channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub k: usize,
    pub lambda: f64,
    pub mult: u64,
}

impl Mode {
    pub fn new(n: Dim, k: usize) -> Result<Self> {
        Ok(Mode {
            k,
            lambda: laplace_eigenvalue(n, k),
            mult: multiplicity(n, k)?,
        })
    }
}

/// Laplace eigenvalue `k(n+k-2)` of degree-`k` harmonics.
pub fn laplace_eigenvalue(n: Dim, k: usize) -> f64 {
    let k = k as f64;
    k * (n.as_f64() + k - 2.0)
}

/// Multiplicity of the degree-`k` eigenvalue, computed in checked integer arithmetic.
///
/// Uses `m_k = C(n+k-3, k-1) (n+2k-2) / k`, which is the falling product
/// `(n+k-3)...(n-1) / k!` times `(n+2k-2)`.
pub fn multiplicity(n: Dim, k: usize) -> Result<u64> {
    if k == 0 {
        return Ok(1);
    }
    let n = u128::from(n.get());
    let k = k as u128;
    let overflow = || Error::Overflow(format!("multiplicity for n={n}, k={k}"));
    // c_j = C(n-2+j, j); each step divides exactly.
    let mut c: u128 = 1;
    for j in 1..k {
        c = c.checked_mul(n - 2 + j).ok_or_else(overflow)? / j;
    }
    let top = c.checked_mul(n + 2 * k - 2).ok_or_else(overflow)?;
    debug_assert_eq!(top % k, 0);
    u64::try_from(top / k).map_err(|_| overflow())
}

/// Modes `0..=k_max` with their eigenvalues and multiplicities.
pub fn mode_table(n: Dim, k_max: usize) -> Result<Vec<Mode>> {
    (0..=k_max).map(|k| Mode::new(n, k)).collect()
}
