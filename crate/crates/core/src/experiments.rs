//! Scripted numerical checks with tabular reports.
//!
//! Every report is deterministic for a fixed configuration; the only
//! randomness is a seeded ChaCha generator in [`minmax_experiment`].

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annulus::{sd_eigenvalue, sn_eigenvalue, OuterRadius};
use crate::bounds::{
    appendix_comparator, bound_m1_plus_1_with, bound_sigma1, critical_length_l1, critical_length_l2,
    stability_constants, stability_gap_cnl, stability_gap_cnlm,
};
use crate::error::{domain, Error, Result};
use crate::modes::Dim;
use crate::profiles::{
    sharpness_excess, smoothed_max_profile, successor_profile, Profile, SmoothingShape,
};
use crate::solver::{
    rayleigh_quotient, richardson, sigma_extrapolated, steklov_spectrum, ModeFunction, SolverConfig,
};

/// Formats with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column-named numeric table.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV with a header row; numbers rendered by `fmt`.
    pub fn to_csv_with(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        self.to_csv_with(fmt17)
    }
}

/// Outcome of one asserted property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub invariant: String,
    pub passed: bool,
    /// Offending or summarizing values.
    pub detail: String,
}

impl Check {
    fn new(invariant: &str, passed: bool, detail: String) -> Self {
        Check {
            invariant: invariant.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub id: String,
    pub n: u32,
    pub grid: usize,
    pub parameters: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, Table>,
    pub checks: Vec<Check>,
    pub tolerances: BTreeMap<String, f64>,
    /// Wall-clock time; excluded from serialized output so reports stay byte-identical.
    #[serde(skip)]
    pub runtime: Duration,
}

impl ExperimentReport {
    fn new(id: &str, n: Dim, grid: usize) -> Self {
        ExperimentReport {
            id: id.to_string(),
            n: n.get(),
            grid,
            parameters: BTreeMap::new(),
            tables: BTreeMap::new(),
            checks: Vec::new(),
            tolerances: BTreeMap::new(),
            runtime: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, invariant: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.invariant == invariant)
    }

    /// File name stem encoding experiment id, dimension and grid.
    pub fn file_stem(&self) -> String {
        format!("{}_n{}_N{}", self.id, self.n, self.grid)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Experiments runnable by id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Sharpness,
    Monotonicity,
    Stability,
    Minmax,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [
        ExperimentId::Sharpness,
        ExperimentId::Monotonicity,
        ExperimentId::Stability,
        ExperimentId::Minmax,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Sharpness => "sharpness",
            ExperimentId::Monotonicity => "monotonicity",
            ExperimentId::Stability => "stability",
            ExperimentId::Minmax => "minmax",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown experiment id {s:?}")))
    }
}

fn sigma1(p: &Profile, n: Dim, cfg: &SolverConfig) -> Result<f64> {
    steklov_spectrum(p, n, 2, cfg)?
        .sigma(1)
        .ok_or_else(|| Error::Internal("spectrum shorter than requested".into()))
}

/// Tolerance on the extrapolated limit of the sharpness family.
pub const SHARPNESS_LIMIT_TOL: f64 = 1e-2;

/// `sigma_1` of smoothed degenerate metrics against `B_n(L)` as the smoothing shrinks.
pub fn sharpness_experiment(n: Dim, length: f64, deltas: &[f64], cfg: &SolverConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if deltas.len() < 3 {
        return domain("sharpness needs at least three smoothing widths");
    }
    if !deltas.windows(2).all(|w| w[1] < w[0]) {
        return domain("smoothing widths must be decreasing");
    }
    let bound = bound_sigma1(n, length)?.value;
    let mut report = ExperimentReport::new("sharpness", n, cfg.grid);
    report.parameters.insert("L".into(), length);
    report.parameters.insert("bound".into(), bound);
    report.tolerances.insert("limit".into(), SHARPNESS_LIMIT_TOL);
    let mut table = Table::new(&["delta", "sigma1", "sigma1_grid", "error_estimate", "gap", "epsilon_star"]);
    let mut sigmas = Vec::new();
    for &d in deltas {
        let p = smoothed_max_profile(length, d, SmoothingShape::Quadratic)?;
        let s = sigma_extrapolated(&p, n, 1, cfg)?;
        sigmas.push(s.value);
        table.push(vec![d, s.value, s.raw, s.error, bound - s.value, sharpness_excess(&p, n)]);
    }
    let below: Vec<_> = sigmas.iter().zip(deltas).filter(|(&s, _)| s >= bound).collect();
    report.checks.push(Check::new(
        "sigma1_below_bound",
        below.is_empty(),
        format!("violations (sigma1, delta): {below:?}"),
    ));
    let increasing = sigmas.windows(2).all(|w| w[1] > w[0]);
    report.checks.push(Check::new(
        "sigma1_increasing_as_delta_decreases",
        increasing,
        format!("sigma1 = {sigmas:?}"),
    ));
    let l = deltas.len();
    let ratio = deltas[l - 2] / deltas[l - 1];
    let (order, limit) = richardson(sigmas[l - 3], sigmas[l - 2], sigmas[l - 1], ratio);
    report.parameters.insert("observed_order".into(), order);
    report.parameters.insert("extrapolated".into(), limit);
    report.checks.push(Check::new(
        "extrapolated_limit_near_bound",
        (limit - bound).abs() <= SHARPNESS_LIMIT_TOL,
        format!("extrapolated {limit}, bound {bound}, observed order {order}"),
    ));
    report.tables.insert("sigma1".into(), table);
    report.runtime = start.elapsed();
    Ok(report)
}

/// Safety factor on the discretization error in strict comparisons.
pub const ERROR_FACTOR: f64 = 10.0;

/// Steps of the successor chain from the cylinder.
pub const CHAIN_STEPS: usize = 3;

/// Strict increase of `sigma_1..sigma_K` along a successor chain starting at the cylinder.
///
/// Discretization errors are estimated as `|sigma(N) - sigma(N/2)| / 3`.
pub fn monotonicity_experiment(n: Dim, length: f64, count: usize, cfg: &SolverConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if count == 0 {
        return domain("count must be positive");
    }
    let mut chain = vec![Profile::cylinder(length)?];
    for _ in 0..CHAIN_STEPS {
        let next = successor_profile(chain.last().unwrap())?;
        chain.push(next);
    }
    let coarse = SolverConfig {
        grid: cfg.grid / 2,
        ..*cfg
    };
    let mut table = Table::new(&["step", "k", "sigma", "error_estimate", "max_h"]);
    let mut values = Vec::new();
    for (step, p) in chain.iter().enumerate() {
        let fine = steklov_spectrum(p, n, count + 1, cfg)?.values();
        let rough = steklov_spectrum(p, n, count + 1, &coarse)?.values();
        let errs: Vec<f64> = fine.iter().zip(&rough).map(|(a, b)| (a - b).abs() / 3.0).collect();
        for k in 0..=count {
            table.push(vec![step as f64, k as f64, fine[k], errs[k], p.max_value()]);
        }
        values.push((fine, errs));
    }
    let mut report = ExperimentReport::new("monotonicity", n, cfg.grid);
    report.parameters.insert("L".into(), length);
    report.parameters.insert("K".into(), count as f64);
    report.parameters.insert("steps".into(), CHAIN_STEPS as f64);
    report.tolerances.insert("error_factor".into(), ERROR_FACTOR);
    let mut failures = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for s in 1..values.len() {
        let (prev, pe) = &values[s - 1];
        let (next, ne) = &values[s];
        for k in 1..=count {
            let gap = next[k] - prev[k];
            let noise = ERROR_FACTOR * (pe[k] + ne[k]);
            if noise > 0.0 {
                min_ratio = min_ratio.min(gap / (pe[k] + ne[k]));
            }
            if !(gap > noise) {
                failures.push((s, k, gap, noise));
            }
        }
    }
    report.parameters.insert("min_gap_over_error".into(), min_ratio);
    report.checks.push(Check::new(
        "strict_increase_beyond_error",
        failures.is_empty(),
        format!(
            "{} comparisons, failures (step, k, gap, 10x error): {failures:?}",
            CHAIN_STEPS * count
        ),
    ));
    let zeros = values.iter().all(|(v, _)| v[0] == 0.0);
    report
        .checks
        .push(Check::new("sigma0_zero", zeros, "sigma_0 along the chain".into()));
    let bound = bound_sigma1(n, length)?.value;
    let last = values.last().unwrap().0[1];
    report.checks.push(Check::new(
        "final_sigma1_below_bound",
        last < bound,
        format!("sigma1 {last}, bound {bound}"),
    ));
    report.tables.insert("chain".into(), table);
    report.runtime = start.elapsed();
    Ok(report)
}

/// Sampling plan of [`stability_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityPlan {
    /// Offsets `L - L_1`.
    pub offsets: Vec<f64>,
    /// Number of interior points of the `delta` grid on `(0, (B_n - (n-2))/2)`.
    pub delta_points: usize,
    /// Cap half-width of the near-maximizing metrics (capped at `L/8`).
    pub smoothing: f64,
    pub plateau_length: f64,
    pub plateau_heights: Vec<f64>,
    pub plateau_delta: f64,
    /// Sample intervals of the dominated test metrics.
    pub test_samples: usize,
}

impl Default for StabilityPlan {
    fn default() -> Self {
        StabilityPlan {
            offsets: vec![-1.0, -0.3, 0.3, 1.0],
            delta_points: 40,
            smoothing: 0.05,
            plateau_length: 2.0,
            plateau_heights: vec![1.0, 1.3, 1.6],
            plateau_delta: 0.05,
            test_samples: 2048,
        }
    }
}

/// Metric dominated by `min(1 + r, m, 1 + L - r)`: that profile scaled by `1 - 0.05 sin^2(pi r / L)`.
pub fn dominated_test_profile(length: f64, m: f64, samples: usize) -> Result<Profile> {
    Profile::sampled_from(length, samples, |r| {
        let s = (std::f64::consts::PI * r / length).sin();
        (1.0 + r).min(m).min(1.0 + length - r) * (1.0 - 0.05 * s * s)
    })
}

/// Stability around `L_1` and under a plateau constraint on the profile height.
pub fn stability_experiment(n: Dim, plan: &StabilityPlan, cfg: &SolverConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let (l1, b) = critical_length_l1(n)?;
    let (l1, b) = (l1.length, b.value);
    let constants = stability_constants(n)?;
    let c = constants.c;
    let delta_max = 0.5 * (b - (n.as_f64() - 2.0));
    let mut report = ExperimentReport::new("stability", n, cfg.grid);
    report.parameters.insert("L1".into(), l1);
    report.parameters.insert("Bn".into(), b);
    report.parameters.insert("C1".into(), constants.c1);
    report.parameters.insert("C2".into(), constants.c2);
    report.parameters.insert("C".into(), c);

    let mut near = Table::new(&["L", "sigma1", "bn_minus_sigma1", "gap_cnl"]);
    let mut implication = Table::new(&["L", "delta", "antecedent", "abs_l1_minus_l", "c_delta", "holds"]);
    let mut gap_failures = Vec::new();
    let mut implication_failures = Vec::new();
    let mut active = 0usize;
    for &off in &plan.offsets {
        let length = l1 + off;
        if length <= 0.0 {
            continue;
        }
        let p = smoothed_max_profile(length, plan.smoothing.min(length / 8.0), SmoothingShape::Quadratic)?;
        let s = sigma_extrapolated(&p, n, 1, cfg)?.value;
        let dev = b - s;
        let gap = stability_gap_cnl(n, length)?;
        near.push(vec![length, s, dev, gap]);
        if !(dev > gap) {
            gap_failures.push((length, dev, gap));
        }
        for j in 1..=plan.delta_points {
            let delta = delta_max * j as f64 / (plan.delta_points + 1) as f64;
            let antecedent = dev.abs() < delta;
            let dist = (l1 - length).abs();
            let holds = !antecedent || dist < c * delta;
            active += usize::from(antecedent);
            if !holds {
                implication_failures.push((length, delta));
            }
            implication.push(vec![
                length,
                delta,
                f64::from(u8::from(antecedent)),
                dist,
                c * delta,
                f64::from(u8::from(holds)),
            ]);
        }
    }
    report.checks.push(Check::new(
        "near_maximizer_implication",
        implication_failures.is_empty() && active > 0,
        format!(
            "{active} non-vacuous antecedents, failures (L, delta): {implication_failures:?}"
        ),
    ));
    report.checks.push(Check::new(
        "deviation_exceeds_gap_cnl",
        gap_failures.is_empty(),
        format!("failures (L, Bn - sigma1, C(n,L)): {gap_failures:?}"),
    ));

    let mut plateau = Table::new(&["m", "sigma1_test", "lhs", "gap_cnlm"]);
    let mut plateau_failures = Vec::new();
    let length = plan.plateau_length;
    let bl = bound_sigma1(n, length)?.value;
    for &m in &plan.plateau_heights {
        let gap = stability_gap_cnlm(n, length, m, plan.plateau_delta, cfg)?;
        let test = dominated_test_profile(length, m, plan.test_samples)?;
        let s = sigma_extrapolated(&test, n, 1, cfg)?.value;
        let lhs = bl - s;
        plateau.push(vec![m, s, lhs, gap]);
        if !(lhs > gap) {
            plateau_failures.push((m, lhs, gap));
        }
    }
    report.parameters.insert("plateau_L".into(), length);
    report.parameters.insert("plateau_delta".into(), plan.plateau_delta);
    report.checks.push(Check::new(
        "plateau_gap_dominated",
        plateau_failures.is_empty(),
        format!("failures (m, Bn(L) - sigma1, C(n,L,m)): {plateau_failures:?}"),
    ));
    report.tables.insert("near_maximizers".into(), near);
    report.tables.insert("implication".into(), implication);
    report.tables.insert("plateau".into(), plateau);
    report.runtime = start.elapsed();
    Ok(report)
}

/// Slack allowed below `sigma_1` in the min-max check.
pub const MINMAX_TOL: f64 = 1e-8;

/// Rayleigh quotients of random mode functions never drop below `sigma_1`.
///
/// Values are drawn uniformly from `[-1, 1]` at each of `intervals + 1` uniform
/// nodes; for mode 0 the mean boundary trace is then subtracted so the
/// function is orthogonal to constants on the boundary. Modes cycle through `0..=3`.
pub fn minmax_experiment(
    p: &Profile,
    n: Dim,
    trials: usize,
    intervals: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let s1 = sigma1(p, n, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = p.length();
    let nodes: Vec<f64> = (0..=intervals)
        .map(|i| if i == intervals { length } else { length * i as f64 / intervals as f64 })
        .collect();
    let mut table = Table::new(&["trial", "k", "quotient"]);
    let mut failures = Vec::new();
    for t in 0..trials {
        let k = t % 4;
        let mut values: Vec<f64> = (0..=intervals).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if k == 0 {
            let shift = 0.5 * (values[0] + values[intervals]);
            values.iter_mut().for_each(|v| *v -= shift);
        }
        let u = ModeFunction::new(nodes.clone(), values, k)?;
        let q = rayleigh_quotient(p, n, &u)?.unwrap_or(f64::INFINITY);
        table.push(vec![t as f64, k as f64, q]);
        if q < s1 - MINMAX_TOL {
            failures.push((t, k, q));
        }
    }
    let mut report = ExperimentReport::new("minmax", n, cfg.grid);
    report.parameters.insert("L".into(), length);
    report.parameters.insert("sigma1".into(), s1);
    report.parameters.insert("seed".into(), seed as f64);
    report.tolerances.insert("minmax".into(), MINMAX_TOL);
    report.checks.push(Check::new(
        "quotients_above_sigma1",
        failures.is_empty(),
        format!("failures (trial, k, quotient): {failures:?}"),
    ));
    report.tables.insert("quotients".into(), table);
    report.runtime = start.elapsed();
    Ok(report)
}

/// Default seed of [`minmax_experiment`].
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Runs an experiment with its default parameters.
pub fn run_experiment(id: ExperimentId, n: Dim, length: f64, cfg: &SolverConfig) -> Result<ExperimentReport> {
    match id {
        ExperimentId::Sharpness => sharpness_experiment(n, length, &[0.4, 0.2, 0.1, 0.05], cfg),
        ExperimentId::Monotonicity => monotonicity_experiment(n, length, 5, cfg),
        ExperimentId::Stability => stability_experiment(n, &StabilityPlan::default(), cfg),
        ExperimentId::Minmax => {
            let p = smoothed_max_profile(length, 0.1 * length, SmoothingShape::Quadratic)?;
            minmax_experiment(&p, n, 50, 64, DEFAULT_SEED, cfg)
        }
    }
}

/// Which figure's curves to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// `sigma_0^D`, `sigma_(1)^N` and `B_n(L)`.
    BnOfL,
    /// `sigma_0^D`, `sigma_(1)^N`, `sigma_(2)^N` and the piecewise bound on `sigma_{m_1+1}`.
    BnM1Plus1OfL,
    /// `sigma_0^D`, `sigma_(2)^N` and the constant `n - 1`.
    AppendixCurves,
}

impl Figure {
    pub fn as_str(self) -> &'static str {
        match self {
            Figure::BnOfL => "bn_of_l",
            Figure::BnM1Plus1OfL => "bn_m1plus1_of_l",
            Figure::AppendixCurves => "appendix_curves",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub figure: Figure,
    pub n: u32,
    pub table: Table,
    /// Crossing abscissae such as `L1`, `L2`, `L_D`, `L_N`.
    pub annotations: BTreeMap<String, f64>,
}

/// Curves of one figure on `lengths`.
pub fn figure_data(figure: Figure, n: Dim, lengths: &[f64]) -> Result<FigureData> {
    if lengths.is_empty() || !lengths.windows(2).all(|w| w[1] > w[0]) {
        return domain("length grid must be nonempty and increasing");
    }
    let mut annotations = BTreeMap::new();
    let l1 = critical_length_l1(n)?.0.length;
    let table = match figure {
        Figure::BnOfL => {
            annotations.insert("L1".into(), l1);
            let mut t = Table::new(&["L", "sigma0_D", "sigma1_N", "bound"]);
            for &l in lengths {
                let r = OuterRadius::from_length(l)?;
                t.push(vec![
                    l,
                    sd_eigenvalue(n, r, 0)?,
                    sn_eigenvalue(n, r, 1)?,
                    bound_sigma1(n, l)?.value,
                ]);
            }
            t
        }
        Figure::BnM1Plus1OfL => {
            let l2 = critical_length_l2(n)?.length;
            annotations.insert("L1".into(), l1);
            annotations.insert("L2".into(), l2);
            let mut t = Table::new(&["L", "sigma0_D", "sigma1_N", "sigma2_N", "bound"]);
            for &l in lengths {
                let r = OuterRadius::from_length(l)?;
                t.push(vec![
                    l,
                    sd_eigenvalue(n, r, 0)?,
                    sn_eigenvalue(n, r, 1)?,
                    sn_eigenvalue(n, r, 2)?,
                    bound_m1_plus_1_with(n, l, l1, l2)?.value,
                ]);
            }
            t
        }
        Figure::AppendixCurves => {
            let (ld, ln, _) = appendix_comparator(n)?;
            annotations.insert("L_D".into(), ld.length);
            annotations.insert("L_N".into(), ln.length);
            let mut t = Table::new(&["L", "sigma0_D", "sigma2_N", "n_minus_1"]);
            for &l in lengths {
                let r = OuterRadius::from_length(l)?;
                t.push(vec![
                    l,
                    sd_eigenvalue(n, r, 0)?,
                    sn_eigenvalue(n, r, 2)?,
                    n.as_f64() - 1.0,
                ]);
            }
            t
        }
    };
    Ok(FigureData {
        figure,
        n: n.get(),
        table,
        annotations,
    })
}
