//! Locating and certifying zeroes of `E_0` on `Re z = −½` and `E_½` on
//! `Re z = ½`, plus a scan of `E_0` along the imaginary axis.
//!
//! The approximants take the values `±2` at the sample points. Where the
//! measured remainder stays below 2 the series has the approximant's sign,
//! so each sign alternation between neighbouring sample points traps a zero.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{
    self, extremum_angle, line_value, measured_remainder, tail_bounds, window_upper, ApproxError,
    LineSeries,
};
use crate::domains::{self, circle_deviation, classify_region, DomainError, Region};
use crate::series::{eval_e0_fourier_scaled, ComplexPoint, SeriesError, TruncationPolicy, Weight};

/// Default bisection width in `y`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Mapped zeroes closer than this in `F_∞` are counted once.
pub const DEDUP_DISTANCE: f64 = 1e-8;
/// Largest admissible `|Im| / |Re|` along the imaginary-axis scan.
pub const AXIS_IMAG_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroError {
    #[error("sign of the series at y = {y} is not certified by the truncation")]
    SignAnomaly { y: f64 },
    #[error("found {count} zeroes but the valence formula allows at most {budget}")]
    ValenceExceeded { count: usize, budget: i64 },
    #[error("axis value at y = {y} has relative imaginary part {ratio:e}")]
    NotReal { y: f64, ratio: f64 },
    #[error("invalid scan range [{lo}, {hi}] with step {step}")]
    InvalidScan { lo: f64, hi: f64, step: f64 },
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// `v` rounded to 15 significant digits.
pub fn round_sig15(v: f64) -> f64 {
    sig15::round(v)
}

/// Rounds every `f64` to 15 significant digits on serialization.
mod sig15 {
    use serde::Serializer;

    pub fn round(v: f64) -> f64 {
        if v == 0.0 || !v.is_finite() {
            return v;
        }
        format!("{v:.14e}").parse().unwrap_or(v)
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(round(*v))
    }

    pub mod pair {
        use serde::ser::SerializeTuple;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(v: &[f64; 2], s: S) -> Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(2)?;
            t.serialize_element(&super::round(v[0]))?;
            t.serialize_element(&super::round(v[1]))?;
            t.end()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeriesId {
    #[serde(rename = "e0_line")]
    E0Line,
    #[serde(rename = "ehalf_line")]
    EHalfLine,
    #[serde(rename = "p_axis")]
    PAxis,
}

impl SeriesId {
    pub fn name(self) -> &'static str {
        match self {
            SeriesId::E0Line => "e0_line",
            SeriesId::EHalfLine => "ehalf_line",
            SeriesId::PAxis => "p_axis",
        }
    }
}

impl From<LineSeries> for SeriesId {
    fn from(l: LineSeries) -> Self {
        match l {
            LineSeries::E0Line => SeriesId::E0Line,
            LineSeries::EHalfLine => SeriesId::EHalfLine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub n: i64,
    pub angle: f64,
    #[serde(serialize_with = "sig15::serialize")]
    pub y: f64,
    pub predicted_sign: i8,
}

/// `√(2k / ln k)`; the sample angles stay below `arctan` of this.
pub fn y_max_arg(k: Weight) -> f64 {
    let kf = k.k() as f64;
    (2.0 * kf / kf.ln()).sqrt()
}

/// Every extremum of the approximant with angle in `[π/4, arctan(y_max_arg)]`.
pub fn sample_points(k: Weight, line: LineSeries) -> Vec<SamplePoint> {
    let upper = y_max_arg(k).atan();
    let kf = k.k() as f64;
    let first = (FRAC_PI_4 * kf / (2.0 * PI)).floor() as i64 - 1;
    let mut out = Vec::new();
    for n in first.max(0).. {
        let angle = extremum_angle(line, k, n);
        if angle > upper {
            break;
        }
        let y = angle.tan() / 2.0;
        if angle < FRAC_PI_4 || !approx::in_window(y, k) {
            continue;
        }
        let predicted_sign = if line.approximant(y, k) > 0.0 { 1 } else { -1 };
        out.push(SamplePoint {
            n,
            angle,
            y,
            predicted_sign,
        });
    }
    out
}

/// Evaluation of one line at one bracketing point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketPoint {
    /// Sample index, or `None` for an end of the window.
    pub n: Option<i64>,
    #[serde(serialize_with = "sig15::serialize")]
    pub y: f64,
    pub value: f64,
    pub approximant: f64,
    pub remainder: f64,
    pub remainder_tail: f64,
    /// `j1 + j2` (or `n1 + n2`).
    pub analytic_bound: f64,
    /// `|approximant| − min(analytic_bound, |remainder| + remainder_tail)`.
    pub margin: f64,
}

impl BracketPoint {
    pub fn sign(&self) -> i8 {
        if self.approximant > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// A point excluded from bracketing because the approximant does not fix its sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoidedPoint {
    pub series_id: SeriesId,
    pub n: Option<i64>,
    #[serde(serialize_with = "sig15::serialize")]
    pub y: f64,
    pub remainder: f64,
    pub approximant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCertificate {
    pub series_id: SeriesId,
    /// Sample indices at the two ends; `None` marks an end of the window.
    pub indices: [Option<i64>; 2],
    #[serde(with = "pair_f64")]
    pub bracket: [f64; 2],
    pub endpoint_signs: [i8; 2],
    /// `None` for the imaginary-axis zero, which is certified by direct evaluation only.
    pub endpoint_margins: Option<[f64; 2]>,
    #[serde(serialize_with = "sig15::serialize")]
    pub refined_y: f64,
    /// `|scaled series|` at `refined_y`.
    pub residual: f64,
    pub iterations: u32,
}

mod pair_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64; 2], s: S) -> Result<S::Ok, S::Error> {
        super::sig15::pair::serialize(v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 2], D::Error> {
        <[f64; 2]>::deserialize(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineScan {
    pub series_id: SeriesId,
    pub points: Vec<BracketPoint>,
    pub certificates: Vec<ZeroCertificate>,
    pub voided: Vec<VoidedPoint>,
}

fn bracket_point(
    line: LineSeries,
    n: Option<i64>,
    y: f64,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<BracketPoint, ZeroError> {
    let approximant = line.approximant(y, k);
    let rem = measured_remainder(line, y, k, policy)?;
    if !rem.certified {
        return Err(ZeroError::SignAnomaly { y });
    }
    let analytic = tail_bounds(y, k)?.total(line);
    let bound = analytic.min(rem.value.abs() + rem.tail);
    Ok(BracketPoint {
        n,
        y,
        value: approximant + rem.value,
        approximant,
        remainder: rem.value,
        remainder_tail: rem.tail,
        analytic_bound: analytic,
        margin: approximant.abs() - bound,
    })
}

/// Evaluates the line at its sample points and at the two ends of the window,
/// and returns one unrefined certificate per sign alternation.
pub fn bracket_zeros(
    k: Weight,
    line: LineSeries,
    policy: &TruncationPolicy,
) -> Result<LineScan, ZeroError> {
    let samples = sample_points(k, line);
    let top = window_upper(k);
    let mut ys: Vec<(Option<i64>, f64)> = Vec::with_capacity(samples.len() + 2);
    if samples.first().is_none_or(|s| s.y > 0.5) {
        ys.push((None, 0.5));
    }
    ys.extend(samples.iter().map(|s| (Some(s.n), s.y)));
    if samples.last().is_none_or(|s| s.y < top) {
        ys.push((None, top));
    }

    let mut points = Vec::with_capacity(ys.len());
    let mut voided = Vec::new();
    for (n, y) in ys {
        let p = bracket_point(line, n, y, k, policy)?;
        if p.margin > 0.0 {
            points.push(p);
        } else {
            voided.push(VoidedPoint {
                series_id: line.into(),
                n,
                y,
                remainder: p.remainder,
                approximant: p.approximant,
            });
        }
    }

    let certificates = points
        .windows(2)
        .filter(|w| w[0].sign() != w[1].sign())
        .map(|w| ZeroCertificate {
            series_id: line.into(),
            indices: [w[0].n, w[1].n],
            bracket: [w[0].y, w[1].y],
            endpoint_signs: [w[0].sign(), w[1].sign()],
            endpoint_margins: Some([w[0].margin, w[1].margin]),
            refined_y: 0.5 * (w[0].y + w[1].y),
            residual: f64::INFINITY,
            iterations: 0,
        })
        .collect();
    Ok(LineScan {
        series_id: line.into(),
        points,
        certificates,
        voided,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub lo: f64,
    pub hi: f64,
    pub root: f64,
    pub iterations: u32,
}

/// Bisection on `[lo, hi]` where `sign(lo) = sign_lo` and `sign(hi) = −sign_lo`.
///
/// `sign` returns `Ok(None)` when the value at a point is too small to have a
/// certain sign; that point is then returned as the root.
pub fn bisect<E>(
    mut sign: impl FnMut(f64) -> Result<Option<i8>, E>,
    mut lo: f64,
    mut hi: f64,
    sign_lo: i8,
    tol: f64,
) -> Result<Bisection, E> {
    let mut iterations = 0;
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        iterations += 1;
        match sign(mid)? {
            Some(s) if s == sign_lo => lo = mid,
            Some(_) => hi = mid,
            None => {
                return Ok(Bisection {
                    lo,
                    hi,
                    root: mid,
                    iterations,
                })
            }
        }
    }
    Ok(Bisection {
        lo,
        hi,
        root: 0.5 * (lo + hi),
        iterations,
    })
}

fn line_of(id: SeriesId) -> Option<LineSeries> {
    match id {
        SeriesId::E0Line => Some(LineSeries::E0Line),
        SeriesId::EHalfLine => Some(LineSeries::EHalfLine),
        SeriesId::PAxis => None,
    }
}

/// Scaled real value on the imaginary axis: `e^{πik/4} E_0(iy) e^{2πy}`.
fn axis_value(y: f64, k: Weight, policy: &TruncationPolicy) -> Result<(f64, f64, bool), ZeroError> {
    let z = ComplexPoint::new(0.0, y)?;
    let r = eval_e0_fourier_scaled(z, k, policy, 2.0 * PI * y)?;
    let v = k.eighth_phase() * r.value;
    let ratio = if v.re == 0.0 {
        0.0
    } else {
        v.im.abs() / v.re.abs()
    };
    if ratio > AXIS_IMAG_TOLERANCE {
        return Err(ZeroError::NotReal { y, ratio });
    }
    Ok((v.re, r.tail_estimate, r.certified))
}

fn certain(value: f64, tail: f64, certified: bool, y: f64) -> Result<Option<i8>, ZeroError> {
    if !certified {
        return Err(ZeroError::SignAnomaly { y });
    }
    Ok(if value.abs() > tail {
        Some(if value > 0.0 { 1 } else { -1 })
    } else {
        None
    })
}

/// Bisects a bracket down to width `tol`, recording the residual.
pub fn refine_zero(
    cert: &ZeroCertificate,
    k: Weight,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<ZeroCertificate, ZeroError> {
    let eval = |y: f64| -> Result<(f64, f64, bool), ZeroError> {
        match line_of(cert.series_id) {
            Some(line) => {
                let v = line_value(line, y, k, policy)?;
                Ok((v.value, v.tail, v.certified))
            }
            None => axis_value(y, k, policy),
        }
    };
    let b = bisect(
        |y| {
            let (v, t, c) = eval(y)?;
            certain(v, t, c, y)
        },
        cert.bracket[0],
        cert.bracket[1],
        cert.endpoint_signs[0],
        tol,
    )?;
    let (value, _, _) = eval(b.root)?;
    Ok(ZeroCertificate {
        bracket: [b.lo, b.hi],
        refined_y: b.root,
        residual: value.abs(),
        iterations: b.iterations,
        ..cert.clone()
    })
}

/// Grid for the imaginary-axis scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl Default for AxisGrid {
    fn default() -> Self {
        AxisGrid {
            y_min: 1.0,
            y_max: 12.0,
            step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisScan {
    pub grid: AxisGrid,
    pub samples: usize,
    /// Samples whose sign the truncation could not settle.
    pub unsettled: usize,
    pub max_imag_ratio: f64,
    /// Smallest scaled value `e^{πik/4} E_0(iy) e^{2πy}` on the grid.
    pub min_value: f64,
    #[serde(serialize_with = "sig15::serialize")]
    pub min_at_y: f64,
    pub certificate: Option<ZeroCertificate>,
}

/// Scans `e^{πik/4} E_0(iy)` over the grid and bisects the first sign change.
pub fn find_p_zero(
    k: Weight,
    policy: &TruncationPolicy,
    grid: &AxisGrid,
    tol: f64,
) -> Result<AxisScan, ZeroError> {
    if !(grid.step > 0.0 && grid.y_min > 0.0 && grid.y_max > grid.y_min) {
        return Err(ZeroError::InvalidScan {
            lo: grid.y_min,
            hi: grid.y_max,
            step: grid.step,
        });
    }
    let count = ((grid.y_max - grid.y_min) / grid.step + 1e-9).floor() as usize + 1;
    let mut scan = AxisScan {
        grid: *grid,
        samples: count,
        unsettled: 0,
        max_imag_ratio: 0.0,
        min_value: f64::INFINITY,
        min_at_y: grid.y_min,
        certificate: None,
    };
    let mut last: Option<(f64, i8)> = None;
    for i in 0..count {
        let y = grid.y_min + grid.step * i as f64;
        let z = ComplexPoint::new(0.0, y)?;
        let r = eval_e0_fourier_scaled(z, k, policy, 2.0 * PI * y)?;
        let v = k.eighth_phase() * r.value;
        let ratio = if v.re == 0.0 {
            0.0
        } else {
            v.im.abs() / v.re.abs()
        };
        scan.max_imag_ratio = scan.max_imag_ratio.max(ratio);
        if ratio > AXIS_IMAG_TOLERANCE {
            return Err(ZeroError::NotReal { y, ratio });
        }
        if v.re < scan.min_value {
            scan.min_value = v.re;
            scan.min_at_y = y;
        }
        if !r.certified || v.re.abs() <= r.tail_estimate {
            scan.unsettled += 1;
            continue;
        }
        let s = if v.re > 0.0 { 1 } else { -1 };
        if let Some((y0, s0)) = last {
            if s0 != s && scan.certificate.is_none() {
                let cert = ZeroCertificate {
                    series_id: SeriesId::PAxis,
                    indices: [None, None],
                    bracket: [y0, y],
                    endpoint_signs: [s0, s],
                    endpoint_margins: None,
                    refined_y: 0.5 * (y0 + y),
                    residual: f64::INFINITY,
                    iterations: 0,
                };
                scan.certificate = Some(refine_zero(&cert, k, policy, tol)?);
            }
        }
        last = Some((y, s));
    }
    Ok(scan)
}

/// A located zero carried back to `F_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappedZero {
    pub series_id: SeriesId,
    /// Position in the series' own domain: `x + i·y` with `x ∈ {−½, ½, 0}`.
    #[serde(serialize_with = "sig15::serialize")]
    pub y: f64,
    #[serde(serialize_with = "sig15::serialize")]
    pub finf_x: f64,
    #[serde(serialize_with = "sig15::serialize")]
    pub finf_y: f64,
    pub region: Option<Region>,
    pub circle_deviation: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCount {
    pub series_id: SeriesId,
    pub count: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub k: Weight,
    pub certificates: Vec<ZeroCertificate>,
    pub mapped_points: Vec<MappedZero>,
    /// Largest `||z − ¼| − ¼|` over the mapped line zeroes.
    pub circle_max_deviation: f64,
    /// Distinct mapped zeroes.
    pub count_found: usize,
    pub per_series: Vec<SeriesCount>,
    /// `⌊k/4⌋`.
    pub valence_budget: i64,
    /// `⌈k/8⌉ − ⌈√(k ln k)⌉`.
    pub theorem_floor: i64,
    pub voided: Vec<VoidedPoint>,
    pub axis_scan: AxisScan,
    pub lines: Vec<LineScan>,
}

pub fn theorem_floor(k: Weight) -> i64 {
    let kf = k.k() as f64;
    (kf / 8.0).ceil() as i64 - (kf * kf.ln()).sqrt().ceil() as i64
}

pub fn valence_budget(k: Weight) -> i64 {
    k.k() / 4
}

fn map_zero(cert: &ZeroCertificate) -> Result<MappedZero, ZeroError> {
    let y = cert.refined_y;
    let z = match cert.series_id {
        SeriesId::E0Line => domains::map_from_f0(ComplexPoint::new(-0.5, y)?)?,
        SeriesId::EHalfLine => domains::map_from_fhalf(ComplexPoint::new(0.5, y)?)?,
        SeriesId::PAxis => domains::map_from_f0(ComplexPoint::new(0.0, y)?)?,
    };
    Ok(MappedZero {
        series_id: cert.series_id,
        y,
        finf_x: z.x,
        finf_y: z.y,
        region: classify_region(z),
        circle_deviation: circle_deviation(z),
        residual: cert.residual,
    })
}

/// Runs both line searches and the axis scan, maps every zero into `F_∞`
/// and checks the total against the valence budget.
pub fn compile_report(
    k: Weight,
    policy: &TruncationPolicy,
    grid: &AxisGrid,
    tol: f64,
) -> Result<ZeroReport, ZeroError> {
    let mut certificates = Vec::new();
    let mut lines = Vec::new();
    let mut voided = Vec::new();
    let mut per_series = Vec::new();
    for line in LineSeries::ALL {
        let mut scan = bracket_zeros(k, line, policy)?;
        let refined = scan
            .certificates
            .iter()
            .map(|c| refine_zero(c, k, policy, tol))
            .collect::<Result<Vec<_>, _>>()?;
        scan.certificates = refined.clone();
        per_series.push(SeriesCount {
            series_id: line.into(),
            count: refined.len(),
            samples: sample_points(k, line).len(),
        });
        certificates.extend(refined);
        voided.extend(scan.voided.iter().cloned());
        lines.push(scan);
    }
    let axis_scan = find_p_zero(k, policy, grid, tol)?;
    if let Some(c) = &axis_scan.certificate {
        certificates.push(c.clone());
    }
    per_series.push(SeriesCount {
        series_id: SeriesId::PAxis,
        count: usize::from(axis_scan.certificate.is_some()),
        samples: axis_scan.samples,
    });

    let mut mapped: Vec<MappedZero> = Vec::new();
    for c in &certificates {
        mapped.push(map_zero(c)?);
    }
    let circle_max_deviation = mapped
        .iter()
        .filter(|m| m.series_id != SeriesId::PAxis)
        .map(|m| m.circle_deviation)
        .fold(0.0, f64::max);
    let mut distinct: Vec<(f64, f64)> = Vec::new();
    for m in &mapped {
        if !distinct
            .iter()
            .any(|&(x, y)| (x - m.finf_x).hypot(y - m.finf_y) < DEDUP_DISTANCE)
        {
            distinct.push((m.finf_x, m.finf_y));
        }
    }
    let budget = valence_budget(k);
    if distinct.len() as i64 > budget {
        return Err(ZeroError::ValenceExceeded {
            count: distinct.len(),
            budget,
        });
    }
    Ok(ZeroReport {
        k,
        certificates,
        mapped_points: mapped,
        circle_max_deviation,
        count_found: distinct.len(),
        per_series,
        valence_budget: budget,
        theorem_floor: theorem_floor(k),
        voided,
        axis_scan,
        lines,
    })
}
