use proptest::prelude::*;
use steklov_core::bounds::{
    appendix_comparator, bound_m1_plus_1, bound_m1_plus_1_global, bound_sigma1, bound_sigma2_to_m1,
    critical_length_l1, critical_length_l2, critical_length_li_star, k_sequence, l1_upper_bound,
    li_star_upper_bound, stability_constants, stability_gap_cnl, stability_gap_cnlm, Branch,
};
use steklov_core::modes::multiplicity;
use steklov_core::solver::SolverConfig;
use steklov_core::{Dim, Error};

fn dim(n: u32) -> Dim {
    Dim::new(n).unwrap()
}

// Closed forms written out again so the oracles do not share code with the crate.
fn dirichlet(n: f64, r: f64, k: f64) -> f64 {
    let p = r.powf(2.0 * k + n - 2.0);
    ((k + n - 2.0) * p + k) / (p - 1.0)
}

fn neumann(n: f64, r: f64, k: f64) -> f64 {
    let p = r.powf(2.0 * k + n - 2.0);
    k * (k + n - 2.0) * (p - 1.0) / (k * p + k + n - 2.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// Outer radius where the Dirichlet mode-0 and Neumann mode-1 curves cross.
fn r1_oracle(n: u32) -> f64 {
    let nf = n as f64;
    bisect(|r| dirichlet(nf, r, 0.0) - neumann(nf, r, 1.0), 1.0 + 1e-9, 50.0)
}

fn r2_oracle(n: u32) -> f64 {
    let nf = n as f64;
    bisect(|r| dirichlet(nf, r, 0.0) - neumann(nf, r, 2.0), 1.0 + 1e-9, 50.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn sigma1_bound_examples() {
    let b = bound_sigma1(dim(3), 2.0).unwrap();
    assert_eq!((b.value, b.branch), (1.4, Branch::Neumann { k: 1 }));
    let b = bound_sigma1(dim(4), 2.0).unwrap();
    assert!(rel(b.value, 45.0 / 19.0) < 1e-15);
    assert_eq!(b.branch, Branch::Neumann { k: 1 });
    let b = bound_sigma1(dim(3), 1e7).unwrap();
    assert_eq!(b.branch, Branch::Dirichlet { k: 0 });
    assert!((b.value - 1.0).abs() < 1e-6);
}

#[test]
fn critical_length_l1_matches_oracle() {
    for n in 3..=12u32 {
        let nf = n as f64;
        let r1 = r1_oracle(n);
        let (cl, bn) = critical_length_l1(dim(n)).unwrap();
        assert!(rel(cl.outer_radius(), r1) < 1e-10, "n={n}");
        assert!(rel(cl.length, 2.0 * (r1 - 1.0)) < 1e-10, "n={n}");
        assert!(cl.residual <= 1e-12);
        assert!(rel(bn.value, dirichlet(nf, r1, 0.0)) < 1e-10);
        assert!(nf - 2.0 < bn.value && bn.value < nf - 1.0);
        assert!(cl.length < l1_upper_bound(dim(n)));
        let (lo, hi) = cl.bracket.unwrap();
        assert!(lo < cl.length && cl.length < hi);
    }
    // The n = 3 quartic R^4 - 2R^3 - 4R + 2 vanishes at R_1.
    let r = critical_length_l1(dim(3)).unwrap().0.outer_radius();
    let q = r.powi(4) - 2.0 * r.powi(3) - 4.0 * r + 2.0;
    assert!(q.abs() < 1e-12 * (r.powi(4) + 2.0 * r.powi(3) + 4.0 * r + 2.0));
    assert!((r - 2.5088444949730725).abs() < 1e-12);
    let b3 = critical_length_l1(dim(3)).unwrap().1.value;
    assert!((b3 - 1.6627588219539128).abs() < 1e-12);
}

#[test]
fn l1_upper_bound_shrinks() {
    assert!((l1_upper_bound(dim(3)) - 14.0).abs() < 1e-12);
    for n in 3..=50 {
        assert!(critical_length_l1(dim(n)).unwrap().0.length < l1_upper_bound(dim(n)));
    }
    assert!(l1_upper_bound(dim(2000)) < 0.05);
}

#[test]
fn branch_switches_at_l1() {
    for n in 3..=12u32 {
        let l1 = critical_length_l1(dim(n)).unwrap().0.length;
        for f in [0.1, 0.5, 0.9, 0.999] {
            assert_eq!(bound_sigma1(dim(n), f * l1).unwrap().branch, Branch::Neumann { k: 1 });
        }
        for f in [1.001, 1.5, 3.0, 10.0] {
            assert_eq!(bound_sigma1(dim(n), f * l1).unwrap().branch, Branch::Dirichlet { k: 0 });
        }
    }
}

#[test]
fn l2_matches_oracle_and_precedes_l1() {
    for n in 3..=12u32 {
        let l2 = critical_length_l2(dim(n)).unwrap();
        assert!(rel(l2.outer_radius(), r2_oracle(n)) < 1e-10, "n={n}");
        assert!(l2.residual <= 1e-12);
        assert!(l2.length < critical_length_l1(dim(n)).unwrap().0.length);
    }
    let r = critical_length_l2(dim(3)).unwrap().outer_radius();
    let q = 4.0 * r.powi(6) - 6.0 * r.powi(5) - 9.0 * r + 6.0;
    assert!(q.abs() < 1e-12 * (4.0 * r.powi(6) + 6.0 * r.powi(5) + 9.0 * r + 6.0));
    assert!((critical_length_l2(dim(3)).unwrap().length - 1.3456439217434435).abs() < 1e-12);
}

#[test]
fn sigma2_to_m1_bound() {
    assert!(rel(bound_sigma2_to_m1(dim(3), 2.0).unwrap().value, 1.4) < 1e-15);
    assert!((bound_sigma2_to_m1(dim(5), 1e6).unwrap().value - 4.0).abs() < 1e-5);
}

#[test]
fn piecewise_bound_is_continuous_with_expected_branches() {
    let n = dim(5);
    let l1 = critical_length_l1(n).unwrap().0.length;
    let l2 = critical_length_l2(n).unwrap().length;
    assert_eq!(bound_m1_plus_1(n, l2 * (1.0 + 1e-6)).unwrap().branch, Branch::Dirichlet { k: 0 });
    assert_eq!(bound_m1_plus_1(n, 0.5 * l2).unwrap().branch, Branch::Neumann { k: 2 });
    assert_eq!(bound_m1_plus_1(n, 2.0 * l1).unwrap().branch, Branch::Neumann { k: 1 });
    assert!((bound_m1_plus_1(n, 1e6).unwrap().value - 4.0).abs() < 1e-5);
    for c in [l1, l2] {
        let lo = bound_m1_plus_1(n, c - 1e-9).unwrap().value;
        let hi = bound_m1_plus_1(n, c + 1e-9).unwrap().value;
        assert!((lo - hi).abs() <= 1e-6);
    }
}

// Maximizes the piecewise bound on a log grid, then refines around the best node.
fn sup_on_grid(n: Dim) -> f64 {
    let f = |l: f64| bound_m1_plus_1(n, l).unwrap().value;
    let m = 4000;
    let ls: Vec<f64> = (0..=m).map(|i| 10f64.powf(-3.0 + 9.0 * i as f64 / m as f64)).collect();
    let (best, _) = ls.iter().enumerate().map(|(i, &l)| (i, f(l))).fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let (mut a, mut b) = (ls[best.saturating_sub(1)], ls[(best + 1).min(m)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(f(ls[best]))
}

#[test]
fn global_bound_matches_grid_supremum() {
    for n in 3..=12u32 {
        let g = bound_m1_plus_1_global(dim(n)).unwrap();
        assert!(rel(sup_on_grid(dim(n)), g.value) < 1e-6, "n={n}");
        let nf = n as f64;
        if n <= 6 {
            assert_eq!(g.branch, Branch::Dirichlet { k: 0 });
            assert!(rel(g.value, dirichlet(nf, r2_oracle(n), 0.0)) < 1e-10);
        } else {
            assert_eq!(g.branch, Branch::ConstantNMinus1);
            assert_eq!(g.value, nf - 1.0);
        }
    }
}

#[test]
fn appendix_closed_forms() {
    for n in 3..=20u32 {
        let nf = n as f64;
        let (ld, ln, branch) = appendix_comparator(dim(n)).unwrap();
        // L_D: sigma_0^D = n - 1; L_N: sigma_(2)^N = n - 1.
        let rd = bisect(|r| dirichlet(nf, r, 0.0) - (nf - 1.0), 1.0 + 1e-12, 100.0);
        let rn = bisect(|r| neumann(nf, r, 2.0) - (nf - 1.0), 1.0 + 1e-12, 100.0);
        assert!(rel(ld.length, 2.0 * (rd - 1.0)) < 1e-9, "n={n}");
        assert!(rel(ln.length, 2.0 * (rn - 1.0)) < 1e-9, "n={n}");
        let expect = if n <= 6 { Branch::Dirichlet { k: 0 } } else { Branch::ConstantNMinus1 };
        assert_eq!(branch, expect, "n={n}");
    }
}

#[test]
fn li_star_cross_route() {
    for n in 3..=8u32 {
        let nf = n as f64;
        let mut last = f64::INFINITY;
        for i in 1..=20usize {
            let cl = critical_length_li_star(dim(n), i).unwrap();
            let fi = i as f64;
            let r = bisect(|r| dirichlet(nf, r, fi) - neumann(nf, r, fi + 1.0), 1.0 + 1e-12, 20.0);
            assert!(rel(cl.outer_radius(), r) < 1e-9, "n={n} i={i}");
            assert!(cl.residual <= 1e-12);
            assert!(0.0 < cl.length && cl.length < li_star_upper_bound(dim(n), i));
            assert!(cl.length < last);
            last = cl.length;
        }
    }
    assert!((critical_length_li_star(dim(3), 1).unwrap().length - 1.58968).abs() < 1e-5);
}

#[test]
fn k_sequence_window() {
    assert_eq!(k_sequence(dim(3), 2).unwrap(), vec![1, 17]);
    assert_eq!(k_sequence(dim(4), 2).unwrap(), vec![1, 27]);
    for n in 3..=8u32 {
        let ks = k_sequence(dim(n), 6).unwrap();
        assert_eq!(ks[0], 1);
        let m: Vec<u64> = (0..=6).map(|j| multiplicity(dim(n), j).unwrap()).collect();
        for i in 2..=6usize {
            let below: u64 = m[0] + (1..i).map(|j| 2 * m[j]).sum::<u64>() + m[i];
            let upto: u64 = m[0] + (1..=i).map(|j| 2 * m[j]).sum::<u64>();
            assert!(below < ks[i - 1] && ks[i - 1] <= upto);
        }
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn stability_constants_match_closed_forms() {
    for n in 3..=12u32 {
        let nf = n as f64;
        let b = dirichlet(nf, r1_oracle(n), 0.0);
        let c1 = (2.0 / (b - (nf - 2.0)).powi(2)) / (b / (b - (nf - 2.0))).powf((nf - 3.0) / (nf - 2.0));
        let c2 = ((nf - 2.0).powi(2) / (nf - 1.0 - b).powi(2))
            / (nf * (((nf - 1.0) * b + 1.0) / (nf - 1.0 - b)).powf(1.0 / nf));
        let s = stability_constants(dim(n)).unwrap();
        assert!(rel(s.c1, c1) < 1e-8 && rel(s.c2, c2) < 1e-8, "n={n}");
        assert_eq!(s.c, 2.0 * s.c1.max(s.c2));
        assert!(s.c1 > 0.0 && s.c2 > 0.0);
    }
    let s = stability_constants(dim(3)).unwrap();
    assert!((s.c1 - 4.553223420021093).abs() < 1e-9);
    assert!((s.c2 - 1.2520789661160612).abs() < 1e-9);
}

#[test]
fn gap_cnl_examples() {
    let n = dim(3);
    let b3 = critical_length_l1(n).unwrap().1.value;
    assert!((stability_gap_cnl(n, 2.0).unwrap() - (b3 - 1.4)).abs() < 1e-14);
    assert!((stability_gap_cnl(n, 2.0).unwrap() - 0.263).abs() < 1e-3);
    assert!((stability_gap_cnl(n, 10.0).unwrap() - (b3 - 1.2)).abs() < 1e-14);
    let l1 = critical_length_l1(n).unwrap().0.length;
    assert!(matches!(stability_gap_cnl(n, l1), Err(Error::Domain(_))));
    assert!(stability_gap_cnl(n, l1 * (1.0 + 1e-6)).unwrap() < 1e-5);
}

#[test]
fn gap_cnlm_examples() {
    let n = dim(3);
    let cfg = SolverConfig::with_grid(2048);
    let g = stability_gap_cnlm(n, 2.0, 1.0, 0.05, &cfg).unwrap();
    assert!((g - 0.4).abs() < 1e-6, "{g}");
    let mut last = g;
    for m in [1.2, 1.4, 1.6, 1.8] {
        let g = stability_gap_cnlm(n, 2.0, m, 0.05, &cfg).unwrap();
        assert!(g > 0.0 && g < last, "m={m} gap={g}");
        last = g;
    }
    assert!(stability_gap_cnlm(n, 2.0, 2.5, 0.05, &cfg).is_err());
}

proptest! {
    #[test]
    fn sigma1_bound_is_min_of_two_curves(nn in 3u32..=12, l in 0.01f64..50.0) {
        let nf = nn as f64;
        let r = 1.0 + 0.5 * l;
        let b = bound_sigma1(dim(nn), l).unwrap();
        let want = dirichlet(nf, r, 0.0).min(neumann(nf, r, 1.0));
        prop_assert!(rel(b.value, want) < 1e-12);
        prop_assert!(b.value > 0.0);
        prop_assert!(bound_sigma2_to_m1(dim(nn), l).unwrap().value >= b.value);
        let bn = critical_length_l1(dim(nn)).unwrap().1.value;
        prop_assert!(b.value <= bn * (1.0 + 1e-12));
    }
}
