//! Warping profiles `h` on `[0, L]` defining metrics `dr^2 + h(r)^2 g_0`.
//!
//! A profile is admissible when `h(0) = h(L) = 1`, `h > 0` and `|h'| <= 1`.
//! Profiles are stored either as analytic segments (lines and smooth
//! slope blends) or as samples interpolated linearly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modes::Dim;

/// Slack on `|h'| <= 1` for sampled profiles.
pub const SLOPE_TOL: f64 = 1e-9;
/// Tolerance on endpoint values and symmetry.
pub const VALUE_TOL: f64 = 1e-12;
/// Minimum number of sample intervals.
pub const MIN_SAMPLE_INTERVALS: usize = 16;

/// How a blend segment moves its slope from one value to another.
///
/// The slope is `s0 + (s1 - s0) S(t)` on the normalized segment, with
/// `S` increasing from 0 to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingShape {
    /// `S(t) = t`; C1 joins.
    #[default]
    Quadratic,
    /// `S(t) = 3t^2 - 2t^3`; C2 joins.
    Smoothstep,
    /// `S(t) = (1 - cos(pi t))/2`; C2 joins.
    Cosine,
}

impl SmoothingShape {
    fn ramp(self, t: f64) -> f64 {
        match self {
            SmoothingShape::Quadratic => t,
            SmoothingShape::Smoothstep => t * t * (3.0 - 2.0 * t),
            SmoothingShape::Cosine => 0.5 * (1.0 - (std::f64::consts::PI * t).cos()),
        }
    }

    /// `int_0^t S`.
    fn ramp_integral(self, t: f64) -> f64 {
        match self {
            SmoothingShape::Quadratic => 0.5 * t * t,
            SmoothingShape::Smoothstep => t * t * t * (1.0 - 0.5 * t),
            SmoothingShape::Cosine => {
                let pi = std::f64::consts::PI;
                0.5 * t - (pi * t).sin() / (2.0 * pi)
            }
        }
    }

    fn ramp_inverse(self, x: f64) -> f64 {
        match self {
            SmoothingShape::Quadratic => x,
            SmoothingShape::Cosine => (1.0 - 2.0 * x).acos() / std::f64::consts::PI,
            SmoothingShape::Smoothstep => {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.ramp(mid) < x {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn is_c2(self) -> bool {
        !matches!(self, SmoothingShape::Quadratic)
    }
}

/// One analytic piece of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    /// `h = h_start + slope (r - start)`.
    Linear {
        start: f64,
        end: f64,
        h_start: f64,
        slope: f64,
    },
    /// Slope moving from `slope_start` to `slope_end` along `shape` over
    /// `[start, start + width]`; `end` is smaller than `start + width` when cut.
    Blend {
        start: f64,
        end: f64,
        width: f64,
        h_start: f64,
        slope_start: f64,
        slope_end: f64,
        shape: SmoothingShape,
    },
}

impl Segment {
    pub fn start(&self) -> f64 {
        match *self {
            Segment::Linear { start, .. } | Segment::Blend { start, .. } => start,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Segment::Linear { end, .. } | Segment::Blend { end, .. } => end,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Segment::Linear {
                start,
                h_start,
                slope,
                ..
            } => h_start + slope * (r - start),
            Segment::Blend {
                start,
                width: w,
                h_start,
                slope_start,
                slope_end,
                shape,
                ..
            } => {
                let t = ((r - start) / w).clamp(0.0, 1.0);
                h_start + w * (slope_start * t + (slope_end - slope_start) * shape.ramp_integral(t))
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            Segment::Linear { slope, .. } => slope,
            Segment::Blend {
                start,
                width,
                slope_start,
                slope_end,
                shape,
                ..
            } => {
                let t = ((r - start) / width).clamp(0.0, 1.0);
                slope_start + (slope_end - slope_start) * shape.ramp(t)
            }
        }
    }

    fn max_abs_slope(&self) -> f64 {
        match *self {
            Segment::Linear { slope, .. } => slope.abs(),
            Segment::Blend {
                slope_start,
                slope_end,
                ..
            } => slope_start.abs().max(slope_end.abs()),
        }
    }

    /// Interior point where the slope vanishes, if any.
    fn critical_point(&self) -> Option<f64> {
        match *self {
            Segment::Linear { .. } => None,
            Segment::Blend {
                start,
                end,
                width,
                slope_start,
                slope_end,
                shape,
                ..
            } => {
                if slope_start * slope_end >= 0.0 {
                    return None;
                }
                let x = slope_start / (slope_start - slope_end);
                let c = start + width * shape.ramp_inverse(x);
                (c < end).then_some(c)
            }
        }
    }

    /// The same segment restricted to `[start, end]`.
    fn cut(self, end: f64) -> Segment {
        match self {
            Segment::Linear { start, h_start, slope, .. } => lin(start, end, h_start, slope),
            Segment::Blend {
                start,
                width,
                h_start,
                slope_start,
                slope_end,
                shape,
                ..
            } => Segment::Blend {
                start,
                end,
                width,
                h_start,
                slope_start,
                slope_end,
                shape,
            },
        }
    }

    fn extremes(&self) -> (f64, f64) {
        let mut lo = self.eval(self.start()).min(self.eval(self.end()));
        let mut hi = self.eval(self.start()).max(self.eval(self.end()));
        if let Some(c) = self.critical_point() {
            lo = lo.min(self.eval(c));
            hi = hi.max(self.eval(c));
        }
        (lo, hi)
    }
}

/// Function representation shared by full and half profiles.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Warp {
    Segments(Vec<Segment>),
    Samples { nodes: Vec<f64>, values: Vec<f64> },
}

impl Warp {
    fn domain_end(&self) -> f64 {
        match self {
            Warp::Segments(s) => s.last().map_or(0.0, |s| s.end()),
            Warp::Samples { nodes, .. } => *nodes.last().unwrap_or(&0.0),
        }
    }

    pub(crate) fn eval(&self, r: f64) -> f64 {
        match self {
            Warp::Segments(segs) => {
                let i = segs.partition_point(|s| s.end() < r).min(segs.len() - 1);
                segs[i].eval(r)
            }
            Warp::Samples { nodes, values } => {
                let i = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
                let (x0, x1) = (nodes[i - 1], nodes[i]);
                let t = ((r - x0) / (x1 - x0)).clamp(0.0, 1.0);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self {
            Warp::Segments(segs) => {
                let mut b: Vec<f64> = segs.iter().map(|s| s.start()).collect();
                b.push(self.domain_end());
                b
            }
            Warp::Samples { nodes, .. } => nodes.clone(),
        }
    }

    fn extremes(&self) -> (f64, f64) {
        match self {
            Warp::Segments(segs) => segs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                let (a, b) = s.extremes();
                (lo.min(a), hi.max(b))
            }),
            Warp::Samples { values, .. } => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        }
    }

    /// Restriction to `[0, end]`.
    fn restrict(&self, end: f64) -> Warp {
        match self {
            Warp::Segments(segs) => Warp::Segments(
                segs.iter()
                    .take_while(|s| s.start() < end)
                    .map(|s| if s.end() > end { s.cut(end) } else { *s })
                    .collect(),
            ),
            Warp::Samples { nodes, values } => {
                let tol = VALUE_TOL * end.max(1.0);
                let mut n2 = Vec::new();
                let mut v2 = Vec::new();
                for (&x, &v) in nodes.iter().zip(values) {
                    if x < end - tol {
                        n2.push(x);
                        v2.push(v);
                    }
                }
                n2.push(end);
                v2.push(self.eval(end));
                Warp::Samples { nodes: n2, values: v2 }
            }
        }
    }
}

/// Constructor family of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Cylinder,
    Degenerate,
    SmoothedMax { delta: f64, shape: SmoothingShape },
    Plateau { m: f64, delta: f64 },
    Successor { generation: usize },
    Samples,
    Segments,
}

/// Admissible (or candidate) warping profile on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    length: f64,
    warp: Warp,
    symmetric: bool,
    family: Family,
}

fn check_length(length: f64) -> Result<()> {
    if !length.is_finite() || length <= 0.0 {
        return domain(format!("meridian length must be positive and finite, got {length}"));
    }
    Ok(())
}

fn lin(start: f64, end: f64, h_start: f64, slope: f64) -> Segment {
    Segment::Linear {
        start,
        end,
        h_start,
        slope,
    }
}

fn blend(start: f64, end: f64, h_start: f64, slope_start: f64, slope_end: f64, shape: SmoothingShape) -> Segment {
    Segment::Blend {
        start,
        end,
        width: end - start,
        h_start,
        slope_start,
        slope_end,
        shape,
    }
}

impl Profile {
    /// The cylinder `h = 1`.
    pub fn cylinder(length: f64) -> Result<Self> {
        check_length(length)?;
        Ok(Profile {
            length,
            warp: Warp::Segments(vec![lin(0.0, length, 1.0, 0.0)]),
            symmetric: true,
            family: Family::Cylinder,
        })
    }

    /// Symmetric profile built from a cap of half-width `delta` on top of `1 + r`.
    ///
    /// `delta` may equal `L/2`; the public constructor requires it to be smaller.
    fn capped(length: f64, delta: f64, shape: SmoothingShape, family: Family) -> Self {
        let c = 0.5 * length;
        let mut segs = Vec::with_capacity(3);
        let a = c - delta;
        if a > 0.0 {
            segs.push(lin(0.0, a, 1.0, 1.0));
        }
        let a = a.max(0.0);
        segs.push(blend(a, length - a, 1.0 + a, 1.0, -1.0, shape));
        if a > 0.0 {
            segs.push(lin(length - a, length, 1.0 + a, -1.0));
        }
        Profile {
            length,
            warp: Warp::Segments(segs),
            symmetric: true,
            family,
        }
    }

    pub fn from_samples(length: f64, samples: Vec<f64>) -> Result<Self> {
        check_length(length)?;
        if samples.len() < MIN_SAMPLE_INTERVALS + 1 {
            return domain(format!(
                "sampled profiles need at least {} samples, got {}",
                MIN_SAMPLE_INTERVALS + 1,
                samples.len()
            ));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return domain(format!("sample {i} is not finite"));
        }
        let m = samples.len() - 1;
        let nodes = (0..=m)
            .map(|i| if i == m { length } else { length * i as f64 / m as f64 })
            .collect();
        let symmetric = (0..=m).all(|i| (samples[i] - samples[m - i]).abs() <= VALUE_TOL * samples[i].abs().max(1.0));
        Ok(Profile {
            length,
            warp: Warp::Samples { nodes, values: samples },
            symmetric,
            family: Family::Samples,
        })
    }

    /// Samples `f` at `intervals + 1` uniform nodes.
    pub fn sampled_from(length: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=intervals)
            .map(|i| f(if i == intervals { length } else { length * i as f64 / intervals as f64 }))
            .collect();
        Profile::from_samples(length, values)
    }

    /// Profile from explicit contiguous segments; `symmetric` is checked by [`validate`].
    pub fn from_segments(length: f64, segments: Vec<Segment>, symmetric: bool) -> Result<Self> {
        check_length(length)?;
        if segments.is_empty() {
            return domain("at least one segment is required");
        }
        let tol = VALUE_TOL * length.max(1.0);
        if segments[0].start().abs() > tol || (segments.last().unwrap().end() - length).abs() > tol {
            return domain("segments must cover [0, L]");
        }
        for w in segments.windows(2) {
            if (w[0].end() - w[1].start()).abs() > tol {
                return domain(format!("segments are not contiguous at r = {}", w[0].end()));
            }
        }
        if segments.iter().any(|s| s.end() <= s.start()) {
            return domain("segments must have positive length");
        }
        Ok(Profile {
            length,
            warp: Warp::Segments(segments),
            symmetric,
            family: Family::Segments,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.warp.eval(r)
    }

    pub fn segments(&self) -> Option<&[Segment]> {
        match &self.warp {
            Warp::Segments(s) => Some(s),
            Warp::Samples { .. } => None,
        }
    }

    /// Points where the profile may fail to be smooth, including both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.warp.breakpoints()
    }

    pub fn max_value(&self) -> f64 {
        self.warp.extremes().1
    }

    pub fn min_value(&self) -> f64 {
        self.warp.extremes().0
    }

    pub(crate) fn warp(&self) -> &Warp {
        &self.warp
    }

    /// Sup-norm distance on a dense grid refined by both profiles' breakpoints.
    pub fn sup_distance(&self, other: &Profile) -> Result<f64> {
        if (self.length - other.length).abs() > VALUE_TOL * self.length {
            return domain("profiles have different meridian lengths");
        }
        let mut pts = dense_points(self.length, 8192);
        pts.extend(self.breakpoints());
        pts.extend(other.breakpoints());
        Ok(pts
            .into_iter()
            .map(|r| (self.eval(r) - other.eval(r)).abs())
            .fold(0.0, f64::max))
    }
}

fn dense_points(end: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| end * i as f64 / m as f64).collect()
}

/// The degenerated maximizer `h*(r) = min(1 + r, 1 + L - r)`.
pub fn degenerate_profile(length: f64) -> Result<Profile> {
    check_length(length)?;
    let c = 0.5 * length;
    Ok(Profile {
        length,
        warp: Warp::Segments(vec![lin(0.0, c, 1.0, 1.0), lin(c, length, 1.0 + c, -1.0)]),
        symmetric: true,
        family: Family::Degenerate,
    })
}

/// `h*` with its corner replaced by a cap of half-width `delta`.
///
/// Equal to `1 + r` on `[0, L/2 - delta]`; the slope blends from 1 to -1
/// across the cap, so `h <= h*` and `|h'| <= 1` hold exactly.
pub fn smoothed_max_profile(length: f64, delta: f64, shape: SmoothingShape) -> Result<Profile> {
    check_length(length)?;
    if !(delta > 0.0 && delta < 0.5 * length) {
        return domain(format!("smoothing width must lie in (0, L/2), got {delta}"));
    }
    Ok(Profile::capped(length, delta, shape, Family::SmoothedMax { delta, shape }))
}

/// Smoothed plateau profile dominating `h_m = min(1 + r, m, 1 + L - r)`.
///
/// Follows `1 + r` up to `m - 1`, turns over a shoulder of width `2 delta`
/// onto the plateau `m + delta`, and mirrors on the right. `m = 1` gives the cylinder.
pub fn plateau_profile(length: f64, m: f64, delta: f64) -> Result<Profile> {
    check_length(length)?;
    if !(m >= 1.0 && m < 1.0 + 0.5 * length) {
        return domain(format!("plateau height must lie in [1, 1 + L/2), got {m}"));
    }
    if m == 1.0 {
        let mut p = Profile::cylinder(length)?;
        p.family = Family::Plateau { m, delta };
        return Ok(p);
    }
    if !(delta > 0.0) || 4.0 * delta > length - 2.0 * (m - 1.0) {
        return domain(format!(
            "smoothing width {delta} does not fit: need 0 < 4 delta <= L - 2(m - 1)"
        ));
    }
    let shape = SmoothingShape::Quadratic;
    let a = m - 1.0;
    let b = a + 2.0 * delta;
    let top = m + delta;
    let mut segs = Vec::with_capacity(5);
    segs.push(lin(0.0, a, 1.0, 1.0));
    segs.push(blend(a, b, m, 1.0, 0.0, shape));
    if length - b > b {
        segs.push(lin(b, length - b, top, 0.0));
    }
    segs.push(blend(length - b, length - a, top, 0.0, -1.0, shape));
    segs.push(lin(length - a, length, m, -1.0));
    Ok(Profile {
        length,
        warp: Warp::Segments(segs),
        symmetric: true,
        family: Family::Plateau { m, delta },
    })
}

/// A strictly larger symmetric profile in the sense of pointwise comparison.
///
/// With `m = max h`, the result is `1 + r` on `[0, m - 1]`, mirrored on the
/// right, and a quadratic cap in between peaking at `(1 + L/2 + m)/2`.
pub fn successor_profile(p: &Profile) -> Result<Profile> {
    let report = validate(p);
    if !report.is_valid() {
        return Err(Error::InvalidProfile(report));
    }
    let length = p.length;
    let m = p.max_value();
    let top = 1.0 + 0.5 * length;
    if m >= top - VALUE_TOL * top {
        return domain("profile is already the degenerated maximizer");
    }
    let generation = match p.family {
        Family::Successor { generation } => generation + 1,
        _ => 1,
    };
    // Quadratic cap of half-width d lowers the peak of 1 + r by d/2.
    let delta = top - m;
    Ok(Profile::capped(
        length,
        delta,
        SmoothingShape::Quadratic,
        Family::Successor { generation },
    ))
}

/// Kind of admissibility violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonFinite,
    NonPositive,
    EndpointValue,
    SlopeExceeded,
    Discontinuous,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Location `r` of the violation.
    pub location: f64,
    /// Offending value (h, slope, or mismatch depending on `kind`).
    pub value: f64,
}

/// List of violated invariants; empty iff the profile is admissible.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, location: f64, value: f64) {
        self.violations.push(Violation { kind, location, value });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?} at r={} (value {})", v.kind, v.location, v.value)?;
        }
        Ok(())
    }
}

fn check_warp(warp: &Warp, report: &mut ValidationReport) {
    match warp {
        Warp::Segments(segs) => {
            for s in segs {
                let (lo, _) = s.extremes();
                if !lo.is_finite() {
                    report.push(ViolationKind::NonFinite, s.start(), lo);
                } else if lo <= 0.0 {
                    report.push(ViolationKind::NonPositive, s.start(), lo);
                }
                let slope = s.max_abs_slope();
                if slope > 1.0 + SLOPE_TOL {
                    report.push(ViolationKind::SlopeExceeded, s.start(), slope);
                }
            }
            for w in segs.windows(2) {
                let r = w[1].start();
                let jump = w[0].eval(w[0].end()) - w[1].eval(r);
                if jump.abs() > VALUE_TOL * w[1].eval(r).abs().max(1.0) {
                    report.push(ViolationKind::Discontinuous, r, jump);
                }
            }
        }
        Warp::Samples { nodes, values } => {
            for (&r, &v) in nodes.iter().zip(values) {
                if v <= 0.0 {
                    report.push(ViolationKind::NonPositive, r, v);
                }
            }
            for i in 1..nodes.len() {
                let slope = (values[i] - values[i - 1]) / (nodes[i] - nodes[i - 1]);
                if slope.abs() > 1.0 + SLOPE_TOL {
                    report.push(ViolationKind::SlopeExceeded, nodes[i - 1], slope);
                }
            }
        }
    }
}

/// Checks `h(0) = h(L) = 1`, `h > 0`, `|h'| <= 1`, and symmetry when flagged.
pub fn validate(p: &Profile) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_warp(&p.warp, &mut report);
    for r in [0.0, p.length] {
        let v = p.eval(r);
        if (v - 1.0).abs() > VALUE_TOL {
            report.push(ViolationKind::EndpointValue, r, v);
        }
    }
    if p.symmetric {
        let mut pts = dense_points(p.length, 1024);
        pts.extend(p.breakpoints());
        for r in pts {
            let d = p.eval(r) - p.eval(p.length - r);
            if d.abs() > VALUE_TOL * p.eval(r).abs().max(1.0) {
                report.push(ViolationKind::Asymmetric, r, d);
                break;
            }
        }
    }
    report
}

/// Condition imposed at the inner end `r = L/2` of a half profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndCondition {
    Dirichlet,
    Neumann,
}

/// Profile restricted to `[0, L/2]` with a condition at `r = L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfProfile {
    half_length: f64,
    warp: Warp,
    condition: EndCondition,
}

impl HalfProfile {
    /// The annulus `A_R` as a half profile: `h = 1 + r` on `[0, R - 1]`.
    pub fn annulus(outer_radius: f64, condition: EndCondition) -> Result<Self> {
        if !(outer_radius > 1.0) || !outer_radius.is_finite() {
            return domain(format!("outer radius must exceed 1, got {outer_radius}"));
        }
        let w = outer_radius - 1.0;
        Ok(HalfProfile {
            half_length: w,
            warp: Warp::Segments(vec![lin(0.0, w, 1.0, 1.0)]),
            condition,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn condition(&self) -> EndCondition {
        self.condition
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.warp.eval(r)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.warp.breakpoints()
    }

    pub(crate) fn warp(&self) -> &Warp {
        &self.warp
    }

    pub fn with_condition(&self, condition: EndCondition) -> Self {
        HalfProfile {
            condition,
            ..self.clone()
        }
    }

    /// Checks `h(0) = 1`, `h > 0` and `|h'| <= 1`.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_warp(&self.warp, &mut report);
        let v = self.eval(0.0);
        if (v - 1.0).abs() > VALUE_TOL {
            report.push(ViolationKind::EndpointValue, 0.0, v);
        }
        report
    }
}

/// Splits a symmetric profile into its Dirichlet and Neumann halves.
pub fn halves(p: &Profile) -> Result<(HalfProfile, HalfProfile)> {
    if !p.symmetric {
        return domain("halves requires a symmetric profile");
    }
    let report = validate(p);
    if report.violations.iter().any(|v| v.kind == ViolationKind::Asymmetric) {
        return Err(Error::InvalidProfile(report));
    }
    let c = 0.5 * p.length;
    let warp = p.warp.restrict(c);
    let dirichlet = HalfProfile {
        half_length: c,
        warp,
        condition: EndCondition::Dirichlet,
    };
    let neumann = dirichlet.with_condition(EndCondition::Neumann);
    Ok((dirichlet, neumann))
}

/// `sup_r max{h*^{n-3} - h^{n-3}, h*^{n-1} - h^{n-1}}` against the degenerated maximizer `h*`.
///
/// Evaluated on a dense grid plus the profile's breakpoints.
pub fn sharpness_excess(p: &Profile, n: Dim) -> f64 {
    let e = n.get() as i32;
    let length = p.length;
    let mut pts = dense_points(length, 8192);
    pts.extend(p.breakpoints());
    pts.into_iter()
        .map(|r| {
            let top = (1.0 + r).min(1.0 + length - r);
            let h = p.eval(r);
            (top.powi(e - 3) - h.powi(e - 3)).max(top.powi(e - 1) - h.powi(e - 1))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Serializable description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    #[serde(rename = "L")]
    pub length: f64,
    /// Dimension the profile is intended for; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_hint: Option<u32>,
    #[serde(flatten)]
    pub kind: ProfileKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Cylinder,
    Degenerate,
    SmoothedMax {
        delta: f64,
        #[serde(default)]
        shape: SmoothingShape,
    },
    Plateau { m: f64, delta: f64 },
    /// Uniform samples of `h` on `[0, L]`, both ends included.
    Samples { samples: Vec<f64> },
}

impl ProfileSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("bad profile description: {e}")))
    }

    pub fn build(&self) -> Result<Profile> {
        let l = self.length;
        match &self.kind {
            ProfileKind::Cylinder => Profile::cylinder(l),
            ProfileKind::Degenerate => degenerate_profile(l),
            ProfileKind::SmoothedMax { delta, shape } => smoothed_max_profile(l, *delta, *shape),
            ProfileKind::Plateau { m, delta } => plateau_profile(l, *m, *delta),
            ProfileKind::Samples { samples } => Profile::from_samples(l, samples.clone()),
        }
    }
}
