use approx::assert_relative_eq;
use proptest::prelude::*;
use steklov_core::annulus::{
    mixed_spectrum, sd_eigenvalue, sd_radial_profile, sn_eigenvalue, sn_radial_profile, MixedKind, OuterRadius,
};
use steklov_core::modes::{laplace_eigenvalue, mode_table, multiplicity};
use steklov_core::Dim;

fn dim(n: u32) -> Dim {
    Dim::new(n).unwrap()
}

fn radius(r: f64) -> OuterRadius {
    OuterRadius::new(r).unwrap()
}

// The gap between neighbouring closed-form values decays like R^-(2k+n-2);
// below this it drops under double-precision rounding and only weak order is testable.
fn resolvable(n: u32, r: f64, k: usize) -> bool {
    r.powi(2 * k as i32 + n as i32 - 2) < 1e10
}

fn factorial(m: u32) -> u128 {
    (1..=m as u128).product()
}

// (n+2k-2)(n+k-3)! / (k!(n-2)!) in exact integers.
fn multiplicity_oracle(n: u32, k: u32) -> u128 {
    (n + 2 * k - 2) as u128 * factorial(n + k - 3) / (factorial(k) * factorial(n - 2))
}

// Solve the 2x2 boundary system for a s^k + b s^-(k+n-2) with a given end
// condition at R and value 1 at s = 1, then return -f'(1).
fn steklov_oracle(n: u32, r: f64, k: u32, dirichlet: bool) -> f64 {
    let (p, q) = (k as f64, -((k + n) as f64 - 2.0));
    // Row 1: a + b = 1. Row 2: a * c1 + b * c2 = 0.
    let (c1, c2) = if dirichlet {
        (r.powf(p), r.powf(q))
    } else {
        (p * r.powf(p - 1.0), q * r.powf(q - 1.0))
    };
    let det = c2 - c1;
    let a = c2 / det;
    let b = -c1 / det;
    -(a * p + b * q)
}

#[test]
fn multiplicity_matches_factorial_formula() {
    for n in 3..=12 {
        for k in 0..=20 {
            let got = multiplicity(dim(n), k as usize).unwrap() as u128;
            assert_eq!(got, multiplicity_oracle(n, k), "n={n} k={k}");
        }
        assert_eq!(multiplicity(dim(n), 1).unwrap(), n as u64);
    }
}

#[test]
fn mode_table_examples() {
    let t = mode_table(dim(3), 2).unwrap();
    let triples: Vec<_> = t.iter().map(|m| (m.k, m.lambda, m.mult)).collect();
    assert_eq!(triples, vec![(0, 0.0, 1), (1, 2.0, 3), (2, 6.0, 5)]);
    let t = mode_table(dim(5), 1).unwrap();
    let triples: Vec<_> = t.iter().map(|m| (m.k, m.lambda, m.mult)).collect();
    assert_eq!(triples, vec![(0, 0.0, 1), (1, 4.0, 5)]);
}

#[test]
fn annulus_examples() {
    let n = dim(3);
    let r = radius(2.0);
    assert_relative_eq!(sd_eigenvalue(n, r, 0).unwrap(), 2.0, max_relative = 1e-15);
    assert_relative_eq!(sd_eigenvalue(n, r, 1).unwrap(), 17.0 / 7.0, max_relative = 1e-15);
    assert_eq!(sn_eigenvalue(n, r, 0).unwrap(), 0.0);
    assert_relative_eq!(sn_eigenvalue(n, r, 1).unwrap(), 1.4, max_relative = 1e-15);
    assert_relative_eq!(sn_eigenvalue(n, r, 2).unwrap(), 186.0 / 67.0, max_relative = 1e-15);

    let s = mixed_spectrum(n, r, MixedKind::Neumann, 4).unwrap();
    assert_eq!(s.values(), vec![0.0, 1.4, 1.4, 1.4]);
    let s = mixed_spectrum(n, r, MixedKind::Dirichlet, 1).unwrap();
    assert_eq!(s.values(), vec![2.0]);
}

#[test]
fn radial_profile_examples() {
    let n = dim(3);
    let r = radius(2.0);
    let a0 = sd_radial_profile(n, r, 0).unwrap();
    for s in [1.0, 1.3, 1.7, 2.0] {
        assert_relative_eq!(a0.value(s), 2.0 / s - 1.0, epsilon = 1e-14);
    }
    let a1 = sd_radial_profile(n, r, 1).unwrap();
    for s in [1.0, 1.3, 1.7, 2.0] {
        assert_relative_eq!(a1.value(s), (s - 8.0 / (s * s)) / -7.0, epsilon = 1e-14);
    }
    assert_relative_eq!(-a1.derivative(1.0), 17.0 / 7.0, max_relative = 1e-14);
    let b1 = sn_radial_profile(n, r, 1).unwrap();
    assert_relative_eq!(b1.b / b1.a, 4.0, max_relative = 1e-14);
    assert_relative_eq!(b1.steklov_ratio(), 1.4, max_relative = 1e-14);
    let b0 = sn_radial_profile(n, r, 0).unwrap();
    assert_eq!(b0.value(1.5), 1.0);
    assert_eq!(b0.derivative(1.5), 0.0);
}

#[test]
fn large_radius_limits() {
    for nn in 3..=8 {
        let n = dim(nn);
        let r = radius(1e6);
        assert!((sn_eigenvalue(n, r, 1).unwrap() - (nn as f64 - 1.0)).abs() < 1e-5);
        assert!((sd_eigenvalue(n, r, 0).unwrap() - (nn as f64 - 2.0)).abs() < 1e-5);
    }
}

#[test]
fn radius_too_close_to_one_is_rejected() {
    assert!(OuterRadius::new(1.0).is_err());
    assert!(OuterRadius::new(1.0 + 1e-14).is_err());
    assert!(OuterRadius::new(0.5).is_err());
}

proptest! {
    #[test]
    fn closed_forms_match_linear_system(nn in 3u32..=8, k in 0u32..=10, r in 1.05f64..6.0) {
        let n = dim(nn);
        let rr = radius(r);
        let sd = sd_eigenvalue(n, rr, k as usize).unwrap();
        prop_assert!((sd - steklov_oracle(nn, r, k, true)).abs() <= 1e-9 * sd);
        if k > 0 {
            let sn = sn_eigenvalue(n, rr, k as usize).unwrap();
            prop_assert!((sn - steklov_oracle(nn, r, k, false)).abs() <= 1e-9 * sn);
        }
    }

    #[test]
    fn neumann_below_dirichlet(nn in 3u32..=8, ri in 0usize..4, k in 0usize..=10) {
        let r = radius([1.1, 1.5, 2.0, 5.0][ri]);
        let n = dim(nn);
        let (sn, sd) = (sn_eigenvalue(n, r, k).unwrap(), sd_eigenvalue(n, r, k).unwrap());
        if resolvable(nn, r.get(), k) {
            prop_assert!(sn < sd);
        } else {
            prop_assert!(sn <= sd);
        }
    }

    #[test]
    fn monotone_in_length(nn in 3u32..=8, i in 0usize..=10, l in 0.05f64..20.0, dl in 0.01f64..1.0) {
        let n = dim(nn);
        let a = OuterRadius::from_length(l).unwrap();
        let b = OuterRadius::from_length(l + dl).unwrap();
        let (da, db) = (sd_eigenvalue(n, a, i).unwrap(), sd_eigenvalue(n, b, i).unwrap());
        let (na, nb) = (sn_eigenvalue(n, a, 1).unwrap(), sn_eigenvalue(n, b, 1).unwrap());
        if resolvable(nn, b.get(), i) {
            prop_assert!(db < da);
        } else {
            prop_assert!(db <= da);
        }
        if resolvable(nn, b.get(), 1) {
            prop_assert!(nb > na);
        } else {
            prop_assert!(nb >= na);
        }
    }

    #[test]
    fn laplace_eigenvalue_increasing(nn in 3u32..=12, k in 0usize..=30) {
        prop_assert!(laplace_eigenvalue(dim(nn), k + 1) > laplace_eigenvalue(dim(nn), k));
        if k >= 1 {
            prop_assert!(laplace_eigenvalue(dim(nn + 1), k) > laplace_eigenvalue(dim(nn), k));
        }
    }

    #[test]
    fn radial_functions_are_consistent(nn in 3u32..=8, k in 0usize..=10, r in 1.1f64..4.0) {
        let n = dim(nn);
        let rr = radius(r);
        let alpha = sd_radial_profile(n, rr, k).unwrap();
        let sd = sd_eigenvalue(n, rr, k).unwrap();
        prop_assert!((alpha.steklov_ratio() - sd).abs() <= 1e-12 * sd);
        prop_assert!(alpha.value(r).abs() <= 1e-12);
        let mut fs = vec![alpha];
        if k > 0 {
            let beta = sn_radial_profile(n, rr, k).unwrap();
            let sn = sn_eigenvalue(n, rr, k).unwrap();
            prop_assert!((beta.steklov_ratio() - sn).abs() <= 1e-12 * sn);
            prop_assert!(beta.derivative(r).abs() <= 1e-12 * beta.derivative(1.0).abs());
            fs.push(beta);
        }
        // Finite-difference residual of f'' + (n-1)/s f' - k(k+n-2)/s^2 f.
        let lam = (k * (k + nn as usize - 2)) as f64;
        let nf = nn as f64;
        for f in fs {
            for j in 1..=100 {
                let s = 1.0 + (r - 1.0) * j as f64 / 101.0;
                let h = 1e-3 * s;
                let v = |t: f64| f.value(s + t * h);
                let d1 = (v(-2.0) - 8.0 * v(-1.0) + 8.0 * v(1.0) - v(2.0)) / (12.0 * h);
                let d2 = (-v(-2.0) + 16.0 * v(-1.0) - 30.0 * v(0.0) + 16.0 * v(1.0) - v(2.0)) / (12.0 * h * h);
                let res = d2 + (nf - 1.0) / s * d1 - lam / (s * s) * f.value(s);
                let scale = d2.abs() + ((nf - 1.0) / s * d1).abs() + (lam / (s * s) * f.value(s)).abs() + 1.0;
                prop_assert!(res.abs() <= 1e-8 * scale, "residual {res} at s={s}");
            }
        }
    }
}
