//! Trigonometric approximants of the scaled series on the lines
//! `Re z = −½` (for `E_0`) and `Re z = ½` (for `E_½`), analytic bounds on the
//! remainders, and direct measurement of those remainders.
//!
//! With `r = |½ + iy|` and `δ = arctan(2y)`, the two leading lattice terms give
//! `e^{πik/4} r^{k/2} E_0(−½+iy) ≈ M_0(y)` and `r^{k/2} E_½(½+iy) ≈ M_½(y)`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::UnitPhase;
use crate::series::{
    eval_lattice, ComplexPoint, LatticeOptions, Series, SeriesError, TruncationPolicy, Weight,
};

/// Constant in front of the `J₁`/`N₁` bound.
pub const C1: f64 = 16.0;
/// Constant in front of the `J₂`/`N₂` bound.
pub const C2: f64 = 10.0;
/// Largest admissible `|Im| / |value|` of a scaled line value.
pub const IMAG_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("y = {y} lies outside the window [1/2, {upper}]")]
    OutsideWindow { y: f64, upper: f64 },
    #[error("scaled value at y = {y} has relative imaginary part {ratio:e}")]
    NotReal { y: f64, ratio: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The two lines carrying the zeroes of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LineSeries {
    /// `E_0` on `Re z = −½`.
    #[serde(rename = "e0_line")]
    E0Line,
    /// `E_½` on `Re z = ½`.
    #[serde(rename = "ehalf_line")]
    EHalfLine,
}

impl LineSeries {
    pub const ALL: [LineSeries; 2] = [LineSeries::E0Line, LineSeries::EHalfLine];

    pub fn x(self) -> f64 {
        match self {
            LineSeries::E0Line => -0.5,
            LineSeries::EHalfLine => 0.5,
        }
    }

    pub fn series(self) -> Series {
        match self {
            LineSeries::E0Line => Series::EZero,
            LineSeries::EHalfLine => Series::EHalf,
        }
    }

    /// Phase making the scaled value real: `e^{πik/4}` for `E_0`, 1 for `E_½`.
    pub fn rotation(self, k: Weight) -> UnitPhase {
        match self {
            LineSeries::E0Line => k.eighth_phase(),
            LineSeries::EHalfLine => UnitPhase::ONE,
        }
    }

    pub fn approximant(self, y: f64, k: Weight) -> f64 {
        match self {
            LineSeries::E0Line => m0(y, k),
            LineSeries::EHalfLine => m_half(y, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarCoordinates {
    /// `√(¼ + y²)`.
    pub r: f64,
    /// `arctan(2y)`.
    pub delta: f64,
}

impl PolarCoordinates {
    pub fn new(y: f64) -> Self {
        PolarCoordinates {
            r: (0.25 + y * y).sqrt(),
            delta: (2.0 * y).atan(),
        }
    }
}

/// Upper end `√k / √(2 ln k)` of the window where the bounds apply.
pub fn window_upper(k: Weight) -> f64 {
    let kf = k.k() as f64;
    kf.sqrt() / (2.0 * kf.ln()).sqrt()
}

pub fn in_window(y: f64, k: Weight) -> bool {
    (0.5..=window_upper(k)).contains(&y)
}

/// `M_0(y) = 2cos(δk/2 − πk/4)`.
///
/// Up to sign this is `2cos(δk/2 − π/4)` for `k ≡ 1 (mod 4)` and
/// `2cos(δk/2 + π/4)` for `k ≡ 3 (mod 4)`; the sign is `−1` exactly when
/// `k ≡ 3, 5 (mod 8)`.
pub fn m0(y: f64, k: Weight) -> f64 {
    let p = PolarCoordinates::new(y);
    m0_sign(k) * 2.0 * (p.delta * k.half() + approximant_offset(LineSeries::E0Line, k)).cos()
}

/// `±1` relating `M_0` to the reduced cosine `2cos(δk/2 ∓ π/4)`.
pub fn m0_sign(k: Weight) -> f64 {
    match k.k().rem_euclid(8) {
        3 | 5 => -1.0,
        _ => 1.0,
    }
}

/// `M_½(y) = 2cos(θk/2)` with `θ = arctan(2y)`.
pub fn m_half(y: f64, k: Weight) -> f64 {
    2.0 * (PolarCoordinates::new(y).delta * k.half()).cos()
}

fn scaled_inv_power(w: Complex64, ln_r: f64, k: Weight) -> Complex64 {
    (k.half() * (ln_r - w.ln())).exp()
}

/// `e^{πik/4} r^{k/2} (z^{−k/2} + (z+1)^{−k/2})` at `z = −½ + iy`.
pub fn m0_direct(y: f64, k: Weight) -> Complex64 {
    let ln_r = PolarCoordinates::new(y).r.ln();
    let z = Complex64::new(-0.5, y);
    k.eighth_phase() * (scaled_inv_power(z, ln_r, k) + scaled_inv_power(z + 1.0, ln_r, k))
}

/// `r^{k/2} (z^{−k/2} + i^k (z−1)^{−k/2})` at `z = ½ + iy`.
pub fn m_half_direct(y: f64, k: Weight) -> Complex64 {
    let ln_r = PolarCoordinates::new(y).r.ln();
    let z = Complex64::new(0.5, y);
    scaled_inv_power(z, ln_r, k) + UnitPhase::I.pow(k.k()) * scaled_inv_power(z - 1.0, ln_r, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub j1: f64,
    pub j2: f64,
    pub n1: f64,
    pub n2: f64,
}

impl TailBounds {
    pub fn total(&self, line: LineSeries) -> f64 {
        match line {
            LineSeries::E0Line => self.j1 + self.j2,
            LineSeries::EHalfLine => self.n1 + self.n2,
        }
    }
}

/// Bounds on the remainders `J₁, J₂` (for `E_0`) and `N₁, N₂` (for `E_½`).
pub fn tail_bounds(y: f64, k: Weight) -> Result<TailBounds, ApproxError> {
    if !in_window(y, k) {
        return Err(ApproxError::OutsideWindow {
            y,
            upper: window_upper(k),
        });
    }
    let kf = k.k() as f64;
    let a = 0.25 + y * y;
    let j1 = C1 * a * (a / (2.25 + y * y)).powf((kf - 4.0) / 4.0);
    let j2 = C2 * (8.0f64 / 81.0).powf(kf / 4.0) * (3.0 * y / kf.sqrt());
    Ok(TailBounds {
        j1,
        j2,
        n1: j1,
        n2: j2,
    })
}

/// A scaled line value `rotation · r^{k/2} · E(x + iy)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineValue {
    pub y: f64,
    /// Real part of the scaled value.
    pub value: f64,
    /// `|Im| / |value|`.
    pub imag_ratio: f64,
    /// Absolute truncation bound in the same scaling.
    pub tail: f64,
    pub certified: bool,
}

impl LineValue {
    /// `±1` when the truncation bound cannot flip the sign, else `None`.
    pub fn certain_sign(&self) -> Option<i8> {
        if self.value.abs() > self.tail && self.certified {
            Some(if self.value > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }
}

fn scaled_line(
    line: LineSeries,
    y: f64,
    k: Weight,
    policy: &TruncationPolicy,
    exclude_leading: bool,
) -> Result<(Complex64, f64, bool), ApproxError> {
    let z = ComplexPoint::new(line.x(), y)?;
    let ln_scale = k.half() * PolarCoordinates::new(y).r.ln();
    let res = eval_lattice(
        line.series(),
        z,
        k,
        policy,
        LatticeOptions {
            ln_scale,
            exclude_leading,
        },
    )?;
    Ok((
        line.rotation(k) * res.value,
        res.tail_estimate,
        res.certified,
    ))
}

/// The real scaled value of the series on its line.
pub fn line_value(
    line: LineSeries,
    y: f64,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<LineValue, ApproxError> {
    let (v, tail, certified) = scaled_line(line, y, k, policy, false)?;
    let imag_ratio = if v.re == 0.0 {
        0.0
    } else {
        v.im.abs() / v.re.abs()
    };
    Ok(LineValue {
        y,
        value: v.re,
        imag_ratio,
        tail,
        certified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remainder {
    pub y: f64,
    /// Scaled series minus approximant.
    pub value: f64,
    /// `|Im|` of the remainder relative to the scaled series value.
    pub imag_ratio: f64,
    /// Truncation bound on the remainder.
    pub tail: f64,
    pub certified: bool,
}

/// Scaled series minus approximant, summed directly over every lattice term
/// except the two leading ones.
pub fn measured_remainder(
    line: LineSeries,
    y: f64,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<Remainder, ApproxError> {
    let (v, tail, certified) = scaled_line(line, y, k, policy, true)?;
    let full = (line.approximant(y, k) + v.re).abs();
    let imag_ratio = if full == 0.0 {
        v.im.abs()
    } else {
        v.im.abs() / full
    };
    if imag_ratio > IMAG_TOLERANCE {
        return Err(ApproxError::NotReal {
            y,
            ratio: imag_ratio,
        });
    }
    Ok(Remainder {
        y,
        value: v.re,
        imag_ratio,
        tail,
        certified,
    })
}

/// Phase of the reduced cosine: `2cos(angle·k/2 + offset)` has its extrema at
/// `angle = (2πn − 2·offset)/k`.
pub(crate) fn approximant_offset(line: LineSeries, k: Weight) -> f64 {
    match (line, k.k_mod_4()) {
        (LineSeries::E0Line, 1) => -FRAC_PI_4,
        (LineSeries::E0Line, _) => FRAC_PI_4,
        (LineSeries::EHalfLine, _) => 0.0,
    }
}

/// `n`-th extremum of the approximant of `line`, where it equals `±2`.
pub(crate) fn extremum_angle(line: LineSeries, k: Weight, n: i64) -> f64 {
    (2.0 * PI * n as f64 - 2.0 * approximant_offset(line, k)) / k.k() as f64
}
