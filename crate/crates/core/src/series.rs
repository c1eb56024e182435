//! Evaluation of the three Eisenstein series `E_∞`, `E_0`, `E_½` of weight
//! `k/2` on `Γ₀(4)`: truncated lattice sums with rigorous tail bounds, and the
//! Fourier expansion of `E_0` with its coefficients `b_ℓ`.
//!
//! Every `(w)^{k/2}` uses the principal logarithm, `arg w ∈ (−π, π]`.
//! Terms are formed as `exp(ln_scale − (k/2)·Log w)` so callers can fold a
//! normalization such as `r^{k/2}` into the exponent instead of multiplying
//! numbers that overflow.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::arithmetic::{self, gcd, jacobi_unchecked, ArithmeticError, UnitPhase};

/// Hard ceilings for adaptive truncation.
const MAX_ROWS: i64 = 1 << 13;
const MAX_HALF_WIDTH: i64 = 1 << 15;
const MAX_FOURIER_TERMS: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("weight k = {0} must be an odd integer >= 5")]
    InvalidWeight(i64),
    #[error("point {x} + {y}i is not in the upper half-plane")]
    InvalidPoint { x: f64, y: f64 },
    #[error("cannot raise zero to a half-integral power")]
    ZeroBase,
    #[error("Fourier index must be >= 1, got {0}")]
    InvalidIndex(i64),
    #[error("Fourier expansion diverges or converges too slowly at y = {y}")]
    FourierDivergence { y: f64 },
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// The odd weight numerator `k >= 5`; the series have weight `k/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Weight(i64);

impl Weight {
    pub fn new(k: i64) -> Result<Self, SeriesError> {
        if k < 5 || k % 2 == 0 || k > 100_001 {
            return Err(SeriesError::InvalidWeight(k));
        }
        Ok(Weight(k))
    }

    pub fn k(self) -> i64 {
        self.0
    }

    /// `k/2`.
    pub fn half(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// 1 or 3.
    pub fn k_mod_4(self) -> i64 {
        self.0.rem_euclid(4)
    }

    /// `λ = (k − 1)/2`.
    pub fn lambda(self) -> i64 {
        (self.0 - 1) / 2
    }

    /// `e^{πik/4}`.
    pub fn eighth_phase(self) -> UnitPhase {
        UnitPhase::from_angle(PI * (self.0.rem_euclid(8)) as f64 / 4.0)
    }
}

impl TryFrom<i64> for Weight {
    type Error = SeriesError;
    fn try_from(k: i64) -> Result<Self, SeriesError> {
        Weight::new(k)
    }
}

impl From<Weight> for i64 {
    fn from(w: Weight) -> i64 {
        w.0
    }
}

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub x: f64,
    pub y: f64,
}

impl ComplexPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, SeriesError> {
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(SeriesError::InvalidPoint { x, y });
        }
        Ok(ComplexPoint { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self, SeriesError> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Cutoffs for the lattice and Fourier sums.
///
/// In adaptive mode the cutoffs are lower limits: the evaluator grows them
/// until the tail bound drops below `target_tail` times the modulus of the
/// largest term. In fixed mode they are used as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Rows of the lattice: `u` for `E_0`, `c` for `E_∞`, `d` for `E_½`.
    pub lattice_u_max: i64,
    /// Half-width of the column window around each row's minimum.
    pub lattice_v_max: i64,
    pub fourier_l_max: i64,
    pub coeff_n0_max: i64,
    pub target_tail: f64,
    pub adaptive: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            lattice_u_max: 50,
            lattice_v_max: 8,
            fourier_l_max: 1,
            coeff_n0_max: 100_000,
            target_tail: 1e-12,
            adaptive: true,
        }
    }
}

impl TruncationPolicy {
    pub fn fixed(u_max: i64, v_max: i64, l_max: i64) -> Self {
        TruncationPolicy {
            lattice_u_max: u_max.max(1),
            lattice_v_max: v_max.max(1),
            fourier_l_max: l_max.max(1),
            adaptive: false,
            ..Default::default()
        }
    }

    pub fn with_target(mut self, target_tail: f64) -> Self {
        self.target_tail = target_tail;
        self
    }

    /// Same policy with every cutoff doubled, in fixed mode.
    pub fn doubled(&self) -> Self {
        TruncationPolicy {
            lattice_u_max: 2 * self.lattice_u_max,
            lattice_v_max: 2 * self.lattice_v_max,
            fourier_l_max: 2 * self.fourier_l_max,
            coeff_n0_max: 2 * self.coeff_n0_max,
            target_tail: self.target_tail,
            adaptive: false,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lattice_u_max >= 1
            && self.lattice_v_max >= 1
            && self.fourier_l_max >= 1
            && self.coeff_n0_max >= 1
            && self.target_tail > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    /// Upper bound on the total modulus of the dropped terms.
    pub tail_estimate: f64,
    pub terms_used: u64,
    /// Modulus of the largest single term; the scale certification is judged against.
    pub scale: f64,
    /// Sum of the moduli of the included terms.
    pub abs_sum: f64,
    /// Cutoffs actually used: rows and half-width (lattice) or `ℓ_max` (Fourier).
    pub rows: i64,
    pub half_width: i64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    #[serde(rename = "einf")]
    EInfinity,
    #[serde(rename = "e0")]
    EZero,
    #[serde(rename = "ehalf")]
    EHalf,
}

/// Extra knobs for [`eval_lattice`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LatticeOptions {
    /// Added to the log-modulus of every term (and of the tail bound).
    pub ln_scale: f64,
    /// Drop the two leading terms of `E_0` (`z^{-k/2}`, `(z+1)^{-k/2}`) or
    /// `E_½` (`z^{-k/2}`, `(z−1)^{-k/2}`), or the constant term of `E_∞`.
    pub exclude_leading: bool,
}

/// `w^{k/2}` on the principal branch.
pub fn half_power(w: Complex64, k: Weight) -> Result<Complex64, SeriesError> {
    if w.norm() == 0.0 {
        return Err(SeriesError::ZeroBase);
    }
    Ok((w.ln() * k.half()).exp())
}

pub fn eval_e_inf(
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<EvalResult, SeriesError> {
    eval_lattice(Series::EInfinity, z, k, policy, LatticeOptions::default())
}

pub fn eval_e0_lattice(
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<EvalResult, SeriesError> {
    eval_lattice(Series::EZero, z, k, policy, LatticeOptions::default())
}

pub fn eval_e_half_lattice(
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<EvalResult, SeriesError> {
    eval_lattice(Series::EHalf, z, k, policy, LatticeOptions::default())
}

/// `ln(e^a + e^b)`.
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

// Row/column layout of a series: term `coef · (A z + b)^{-k/2}` with
// `A = factor · row`.
struct Layout {
    factor: i64,
    odd_rows: bool,
}

fn layout(series: Series) -> Layout {
    match series {
        Series::EZero => Layout {
            factor: 1,
            odd_rows: true,
        },
        Series::EInfinity => Layout {
            factor: 4,
            odd_rows: false,
        },
        Series::EHalf => Layout {
            factor: 1,
            odd_rows: true,
        },
    }
}

fn gauss_phase_cache() -> &'static RwLock<HashMap<(i64, i64), f64>> {
    static CACHE: OnceLock<RwLock<HashMap<(i64, i64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Argument of `G(m/n)`, memoized on `(m mod n, n)`.
fn gauss_phase(m: i64, n: i64) -> Result<f64, ArithmeticError> {
    let key = (m.rem_euclid(n), n);
    if let Some(&a) = gauss_phase_cache().read().expect("gauss cache").get(&key) {
        return Ok(a);
    }
    let a = arithmetic::normalized_gauss_sum(key.0, n)?.angle();
    gauss_phase_cache()
        .write()
        .expect("gauss cache")
        .insert(key, a);
    Ok(a)
}

/// Multiplier of the `(row, col)` term, or `None` when the pair is not summed.
fn coefficient(
    series: Series,
    k: Weight,
    row: i64,
    col: i64,
) -> Result<Option<UnitPhase>, SeriesError> {
    match series {
        Series::EZero => {
            // (u, 2v) = 1 with u odd
            if gcd(row, col) != 1 {
                return Ok(None);
            }
            let chi = jacobi_unchecked(-col, row);
            if chi == 0 {
                return Ok(None);
            }
            let eps = arithmetic::epsilon(row)?.pow(k.k());
            let sign = if chi > 0 {
                UnitPhase::ONE
            } else {
                UnitPhase::I.pow(2)
            };
            Ok(Some(eps * sign))
        }
        Series::EInfinity => {
            // (d, 2c) = 1
            if col % 2 == 0 || gcd(row, col) != 1 {
                return Ok(None);
            }
            let g = UnitPhase::from_angle(gauss_phase(-col, 4 * row)?).pow(k.k());
            Ok(Some(k.eighth_phase() * g))
        }
        Series::EHalf => {
            // (2c, d) = 1 with d odd
            if gcd(row, col) != 1 {
                return Ok(None);
            }
            let g = UnitPhase::from_angle(gauss_phase(row - 2 * col, 8 * row)?).pow(k.k());
            Ok(Some(k.eighth_phase().conj() * g))
        }
    }
}

fn is_leading(series: Series, row: i64, col: i64) -> bool {
    match series {
        Series::EZero => row == 1 && (col == 0 || col == 1),
        Series::EHalf => row == 1 && (col == 0 || col == -1),
        Series::EInfinity => false,
    }
}

fn row_admissible(l: &Layout, row: i64) -> bool {
    !l.odd_rows || row % 2 == 1
}

/// Column range `{b : |A x + b| <= half_width + 1/2}`.
fn column_range(a: i64, x: f64, half_width: i64) -> (i64, i64) {
    let center = -(a as f64) * x;
    let reach = half_width as f64 + 0.5;
    (
        (center - reach).ceil() as i64,
        (center + reach).floor() as i64,
    )
}

/// `∫_{-∞}^{∞} (1 + w²)^{-s/2} dw`.
fn ln_line_integral(s: f64) -> f64 {
    0.5 * PI.ln() + ln_gamma((s - 1.0) / 2.0) - ln_gamma(s / 2.0)
}

/// Log of the bound on all rows beyond `rows`.
fn ln_row_tail(s: f64, gy: f64, rows: i64) -> f64 {
    let m = rows as f64;
    let p1 = -s * gy.ln() + (1.0 - s) * m.ln() - (s - 1.0).ln();
    let p2 = ln_line_integral(s) + (1.0 - s) * gy.ln() + (2.0 - s) * m.ln() - (s - 2.0).ln();
    log_add(p1, p2)
}

/// Log of the bound on the columns outside the window, over the included rows.
fn ln_column_tail(s: f64, l: &Layout, y: f64, rows: i64, half_width: i64) -> f64 {
    let reach = half_width as f64 + 0.5;
    let mut acc = f64::NEG_INFINITY;
    for row in 1..=rows {
        if !row_admissible(l, row) {
            continue;
        }
        let c = (l.factor * row) as f64 * y;
        let lq = (reach * reach + c * c).ln();
        let piece = log_add(
            -0.5 * s * lq,
            (1.0 - 0.5 * s) * lq - (reach * (s - 2.0)).ln(),
        );
        acc = log_add(acc, LN_2 + piece);
        // Later rows only shrink; stop once they no longer matter.
        if piece + LN_2 < acc - 50.0 {
            break;
        }
    }
    acc
}

fn ln_term_modulus(s: f64, w: Complex64) -> f64 {
    -s * w.norm().ln()
}

/// Log-modulus of the largest term of the full series (row 1 near its minimum,
/// and the constant term of `E_∞`).
fn ln_leading_scale(series: Series, z: ComplexPoint, k: Weight) -> Result<f64, SeriesError> {
    let l = layout(series);
    let s = k.half();
    let a = l.factor;
    let center = (-(a as f64) * z.x).round() as i64;
    let mut best = f64::NEG_INFINITY;
    for b in center - 2..=center + 2 {
        if coefficient(series, k, 1, b)?.is_some() {
            let w = Complex64::new(a as f64 * z.x + b as f64, a as f64 * z.y);
            best = best.max(ln_term_modulus(s, w));
        }
    }
    if series == Series::EInfinity {
        best = best.max(0.0);
    }
    Ok(best)
}

/// Smallest `n` in `[lo, cap]` with `pred(n)`, assuming `pred` is monotone.
fn smallest_satisfying(lo: i64, cap: i64, pred: impl Fn(i64) -> bool) -> Option<i64> {
    if pred(lo) {
        return Some(lo);
    }
    let mut hi = lo;
    loop {
        if hi >= cap {
            return None;
        }
        let next = (hi * 2).min(cap);
        if pred(next) {
            let mut a = hi;
            let mut b = next;
            while b - a > 1 {
                let mid = a + (b - a) / 2;
                if pred(mid) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Some(b);
        }
        hi = next;
    }
}

/// Truncated lattice sum of one of the three series.
pub fn eval_lattice(
    series: Series,
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
    opts: LatticeOptions,
) -> Result<EvalResult, SeriesError> {
    let l = layout(series);
    let s = k.half();
    let gy = l.factor as f64 * z.y;
    let ln_lead = ln_leading_scale(series, z, k)?;
    // Each of the two tail pieces gets half the budget.
    let ln_budget = ln_lead + policy.target_tail.ln() - LN_2;

    let (rows, half_width) = if policy.adaptive {
        let rows = smallest_satisfying(policy.lattice_u_max.max(1), MAX_ROWS, |m| {
            ln_row_tail(s, gy, m) <= ln_budget
        })
        .unwrap_or(MAX_ROWS);
        let hw = smallest_satisfying(policy.lattice_v_max.max(1), MAX_HALF_WIDTH, |v| {
            ln_column_tail(s, &l, z.y, rows, v) <= ln_budget
        })
        .unwrap_or(MAX_HALF_WIDTH);
        (rows, hw)
    } else {
        (policy.lattice_u_max, policy.lattice_v_max)
    };

    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut terms = 0u64;
    if series == Series::EInfinity && !opts.exclude_leading {
        let c = opts.ln_scale.exp();
        sum += c;
        abs_sum += c;
        terms += 1;
    }
    for row in 1..=rows {
        if !row_admissible(&l, row) {
            continue;
        }
        let a = l.factor * row;
        let (lo, hi) = column_range(a, z.x, half_width);
        for col in lo..=hi {
            if opts.exclude_leading && is_leading(series, row, col) {
                continue;
            }
            let Some(coef) = coefficient(series, k, row, col)? else {
                continue;
            };
            let w = Complex64::new(a as f64 * z.x + col as f64, a as f64 * z.y);
            let ln_mod = opts.ln_scale - s * w.norm().ln();
            let phase = -s * w.arg();
            let modulus = ln_mod.exp();
            sum += coef * Complex64::from_polar(modulus, phase);
            abs_sum += modulus;
            terms += 1;
        }
    }

    let ln_tail = log_add(
        ln_row_tail(s, gy, rows),
        ln_column_tail(s, &l, z.y, rows, half_width),
    );
    let certified = ln_tail <= ln_lead + policy.target_tail.ln();
    Ok(EvalResult {
        value: sum,
        tail_estimate: (ln_tail + opts.ln_scale).exp(),
        terms_used: terms,
        scale: (ln_lead + opts.ln_scale).exp(),
        abs_sum,
        rows,
        half_width,
        certified,
    })
}

/// Which computation produced a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientRoute {
    /// Squarefree closed form plus the prime-square ladder.
    Ladder,
    /// Double sum over odd `n` and `j mod n`.
    Direct,
}

/// One rung of the ladder `b_ℓ = b_{ℓ₀} · ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRatio {
    pub prime: u64,
    pub exponent: u32,
    pub cofactor: u64,
    /// `χ_{(−1)^λ ℓ₀}(p)` for odd `p`; `None` for `p = 2`.
    pub chi: Option<i8>,
    pub ln_ratio: f64,
}

/// Fourier coefficient `b_ℓ` of `E_0`, stored through the real number
/// `e^{πik/4} b_ℓ = sign · e^{ln_abs}` because it overflows quickly in `ℓ` and `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficient {
    pub index: i64,
    pub k: Weight,
    pub ln_abs: f64,
    pub sign: i8,
    /// `|Im| / |Re|` of the computed `e^{πik/4} b_ℓ` before rounding to real.
    pub imag_ratio: f64,
    /// Relative bound on the truncated inner sum.
    pub truncation_tail: f64,
    /// `λ = (k−1)/2`.
    pub lambda: i64,
    pub squarefree_part: u64,
    pub ladder: Vec<LadderRatio>,
    pub route: CoefficientRoute,
}

impl FourierCoefficient {
    /// `e^{πik/4} b_ℓ`.
    pub fn rotated(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    /// `b_ℓ` itself.
    pub fn value(&self) -> Complex64 {
        self.k.eighth_phase().conj() * Complex64::new(self.rotated(), 0.0)
    }

    /// `|b_ℓ / other − 1|`.
    pub fn relative_difference(&self, other: &FourierCoefficient) -> f64 {
        if self.sign != other.sign {
            return 2.0;
        }
        (self.ln_abs - other.ln_abs).exp_m1().abs()
    }
}

/// `ln(π^{k/2} ℓ^{k/2−1} / Γ(k/2))`.
fn ln_coefficient_prefactor(l: i64, k: Weight) -> f64 {
    let s = k.half();
    s * PI.ln() + (s - 1.0) * (l as f64).ln() - ln_gamma(s)
}

fn moebius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
        }
        if let Some(sq) = p.checked_mul(p) {
            for m in (sq..=n).step_by(sq.max(1)) {
                mu[m] = 0;
            }
        }
    }
    mu
}

/// Squarefree `ℓ`: closed-form double sum over odd squarefree `n₀` and odd
/// `n₁ | ℓ`. The `n₁` sum factors out as `Σ μ(n₁) n₁^{1−k}`.
fn squarefree_coefficient(l: i64, k: Weight, n0_max: i64) -> Result<(f64, f64, f64), SeriesError> {
    let s = k.half();
    // |Σ| >= 1 − (ζ(2) − 1) > 0.3 for s >= 5/2, so this cutoff leaves a
    // relative tail below 1e-17.
    let needed = {
        let e = s - 1.5;
        let target = 0.3e-17 * e;
        (target.ln() / (1.5 - s)).exp().ceil() as i64
    };
    let cutoff = needed.clamp(1, n0_max.max(1));
    let mu = moebius_sieve(cutoff as usize);

    let mut n0_sum = Complex64::new(0.0, 0.0);
    for n0 in (1..=cutoff).step_by(2) {
        if mu[n0 as usize] == 0 {
            continue;
        }
        let chi = jacobi_unchecked(-l, n0);
        if chi == 0 {
            continue;
        }
        let eps = arithmetic::epsilon(n0)?.pow(k.k() + 1);
        let mag = (n0 as f64).powf(0.5 - s) * chi as f64;
        n0_sum += eps * Complex64::new(mag, 0.0);
    }
    let mut n1_sum = 0.0;
    for n1 in (1..=l).step_by(2) {
        if l % n1 == 0 {
            let m = arithmetic::moebius(n1 as u64)? as f64;
            n1_sum += m * (n1 as f64).powf(1.0 - k.k() as f64);
        }
    }
    let total = n0_sum * n1_sum;
    let tail = if cutoff >= needed {
        0.3e-17
    } else {
        (cutoff as f64).powf(1.5 - s) / (s - 1.5) * n1_sum.abs() / total.re.abs()
    };
    Ok((total.re, total.im.abs() / total.re.abs(), tail))
}

/// `ln` of the ladder ratio `b_ℓ / b_{ℓ₀}` for `ℓ = p^{2v} ℓ₀`.
fn ln_ladder_ratio(p: u64, v: u32, cofactor: u64, k: Weight) -> (Option<i8>, f64) {
    let kk = (k.k() - 2) as f64;
    let lp = (p as f64).ln();
    if p == 2 {
        return (None, kk * v as f64 * lp);
    }
    let lambda = k.lambda();
    let minus_one = jacobi_unchecked(-1, p as i64);
    let chi =
        (if lambda % 2 == 1 { minus_one } else { 1 }) * jacobi_unchecked(cofactor as i64, p as i64);
    // Σ_{h=0}^{v} p^{h(k−2)} − χ p^{λ−1} Σ_{h=0}^{v−1} p^{h(k−2)},
    // factored as p^{v(k−2)} · bracket.
    let mut bracket = 0.0;
    for j in 0..=v {
        bracket += (-(j as f64) * kk * lp).exp();
    }
    for j in 1..=v {
        bracket -= chi as f64 * (((lambda - 1) as f64 - j as f64 * kk) * lp).exp();
    }
    (Some(chi), v as f64 * kk * lp + bracket.ln())
}

/// `b_ℓ` via the squarefree closed form and the prime-square ladder.
pub fn fourier_b(
    l: i64,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<FourierCoefficient, SeriesError> {
    if l < 1 {
        return Err(SeriesError::InvalidIndex(l));
    }
    let dec = arithmetic::squarefree_decompose(l as u64)?;
    let star = dec.squarefree_part as i64;
    let (sum, imag_ratio, tail) = squarefree_coefficient(star, k, policy.coeff_n0_max)?;
    let mut ln_abs = ln_coefficient_prefactor(star, k) + sum.abs().ln();
    let mut ladder = Vec::with_capacity(dec.ladder.len());
    for step in &dec.ladder {
        let (chi, ln_ratio) = ln_ladder_ratio(step.prime, step.exponent, step.cofactor, k);
        ln_abs += ln_ratio;
        ladder.push(LadderRatio {
            prime: step.prime,
            exponent: step.exponent,
            cofactor: step.cofactor,
            chi,
            ln_ratio,
        });
    }
    Ok(FourierCoefficient {
        index: l,
        k,
        ln_abs,
        sign: if sum >= 0.0 { 1 } else { -1 },
        imag_ratio,
        truncation_tail: tail,
        lambda: k.lambda(),
        squarefree_part: dec.squarefree_part,
        ladder,
        route: CoefficientRoute::Ladder,
    })
}

/// `b_ℓ` by direct double summation over odd `n <= n_max` and `j mod n`.
/// Used as the reference for the ladder route.
pub fn fourier_b_direct(l: i64, k: Weight, n_max: i64) -> Result<FourierCoefficient, SeriesError> {
    if l < 1 {
        return Err(SeriesError::InvalidIndex(l));
    }
    let s = k.half();
    let mut total = Complex64::new(0.0, 0.0);
    let mut n = 1;
    while n <= n_max {
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let chi = jacobi_unchecked(j, n);
            if chi == 0 {
                continue;
            }
            let r = (l as i128 * j as i128).rem_euclid(n as i128) as f64;
            inner += Complex64::from_polar(chi as f64, -2.0 * PI * r / n as f64);
        }
        let eps = arithmetic::epsilon(n)?.pow(k.k());
        total += eps * inner * (n as f64).powf(-s);
        n += 2;
    }
    // |inner| <= n
    let tail = (n_max as f64).powf(2.0 - s) / (s - 2.0) / total.norm();
    let dec = arithmetic::squarefree_decompose(l as u64)?;
    Ok(FourierCoefficient {
        index: l,
        k,
        ln_abs: ln_coefficient_prefactor(l, k) + total.re.abs().ln(),
        sign: if total.re >= 0.0 { 1 } else { -1 },
        imag_ratio: total.im.abs() / total.re.abs(),
        truncation_tail: tail,
        lambda: k.lambda(),
        squarefree_part: dec.squarefree_part,
        ladder: Vec::new(),
        route: CoefficientRoute::Direct,
    })
}

/// `ln` of a bound on `Σ_{ℓ > l_max} 2^{k/2} |b_ℓ| e^{−2πℓy}`, or `None`
/// when the terms are not yet decreasing geometrically.
fn ln_fourier_tail(k: Weight, y: f64, l_max: i64) -> Option<f64> {
    let s = k.half();
    // |b_ℓ| <= π^s ℓ^{s−1}/Γ(s) · Σ_{n odd} n^{1−s} <= ... · (1 + 1/(s−2))
    let ln_c = s * LN_2 + s * PI.ln() - ln_gamma(s) + (1.0 + 1.0 / (s - 2.0)).ln();
    let first = (l_max + 1) as f64;
    let ratio = ((first + 1.0) / first).powf(s - 1.0) * (-2.0 * PI * y).exp();
    if ratio >= 1.0 {
        return None;
    }
    Some(ln_c + (s - 1.0) * first.ln() - 2.0 * PI * y * first - (1.0 - ratio).ln())
}

/// `E_0` through its Fourier expansion `2^{k/2} Σ_{ℓ>=1} b_ℓ q^ℓ`.
pub fn eval_e0_fourier(
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<EvalResult, SeriesError> {
    eval_e0_fourier_scaled(z, k, policy, 0.0)
}

/// As [`eval_e0_fourier`], with `ln_scale` added to every term's log-modulus.
pub fn eval_e0_fourier_scaled(
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
    ln_scale: f64,
) -> Result<EvalResult, SeriesError> {
    let s = k.half();
    let b1 = fourier_b(1, k, policy)?;
    let ln_lead = s * LN_2 + b1.ln_abs - 2.0 * PI * z.y;
    let ln_target = ln_lead + policy.target_tail.ln();

    let l_max = if policy.adaptive {
        let from_height = ((12.0 + k.k() as f64 * LN_2) / (2.0 * PI * z.y)).ceil() as i64;
        let start = policy.fourier_l_max.max(from_height).clamp(1, MAX_FOURIER_TERMS);
        smallest_satisfying(start, MAX_FOURIER_TERMS, |l| {
            ln_fourier_tail(k, z.y, l).is_some_and(|t| t <= ln_target)
        })
        .ok_or(SeriesError::FourierDivergence { y: z.y })?
    } else {
        policy.fourier_l_max
    };

    let mut rotated = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut coefficient_tail = 0.0f64;
    for l in 1..=l_max {
        let b = if l == 1 {
            b1.clone()
        } else {
            fourier_b(l, k, policy)?
        };
        let ln_mod = ln_scale + s * LN_2 + b.ln_abs - 2.0 * PI * z.y * l as f64;
        let modulus = ln_mod.exp();
        rotated += Complex64::from_polar(b.sign as f64 * modulus, 2.0 * PI * z.x * l as f64);
        abs_sum += modulus;
        coefficient_tail += modulus * b.truncation_tail;
    }
    let value = k.eighth_phase().conj() * rotated;
    let (tail, certified) = match ln_fourier_tail(k, z.y, l_max) {
        Some(t) => (
            (t + ln_scale).exp() + coefficient_tail,
            t <= ln_target && coefficient_tail <= policy.target_tail * (ln_lead + ln_scale).exp(),
        ),
        None => (f64::INFINITY, false),
    };
    Ok(EvalResult {
        value,
        tail_estimate: tail,
        terms_used: l_max as u64,
        scale: (ln_lead + ln_scale).exp(),
        abs_sum,
        rows: l_max,
        half_width: 0,
        certified,
    })
}
