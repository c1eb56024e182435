//! Exact number-theoretic primitives: Jacobi symbols, the fourth-root sign
//! `ε_u`, quadratic Gauss sums, the Möbius function and squarefree ladders.

use std::f64::consts::PI;
use std::ops::{Mul, MulAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest magnitude accepted by the integer routines. Keeps every
/// intermediate product comfortably inside 64-bit arithmetic.
pub const INPUT_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("modulus {0} must be an odd positive integer")]
    InvalidModulus(i64),
    #[error("argument {0} must be odd")]
    EvenArgument(i64),
    #[error("argument {0} must be positive")]
    NonPositive(i64),
    #[error("argument {0} exceeds the supported range 2^31")]
    OutOfRange(i64),
    #[error("Gauss sum g({m}/{n}) vanishes and cannot be normalized")]
    VanishingGaussSum { m: i64, n: i64 },
}

fn guard(v: i64) -> Result<(), ArithmeticError> {
    if v.unsigned_abs() > INPUT_LIMIT as u64 {
        Err(ArithmeticError::OutOfRange(v))
    } else {
        Ok(())
    }
}

/// A complex number of modulus one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPhase(Complex64);

impl UnitPhase {
    pub const ONE: UnitPhase = UnitPhase(Complex64::new(1.0, 0.0));
    pub const I: UnitPhase = UnitPhase(Complex64::new(0.0, 1.0));

    /// `e^{i angle}`.
    pub fn from_angle(angle: f64) -> Self {
        UnitPhase(Complex64::from_polar(1.0, angle))
    }

    /// Normalizes a nonzero complex number onto the unit circle.
    pub fn normalize(w: Complex64) -> Option<Self> {
        let r = w.norm();
        if r == 0.0 || !r.is_finite() {
            None
        } else {
            Some(UnitPhase(w / r))
        }
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn angle(self) -> f64 {
        self.0.arg()
    }

    /// Integer power. Exact for the fourth roots of unity.
    pub fn pow(self, k: i64) -> Self {
        let v = self.0;
        if v.im == 0.0 || v.re == 0.0 {
            // 1, -1, i, -i: repeated multiplication stays exact.
            let e = k.rem_euclid(4) as i32;
            return UnitPhase(v.powi(e));
        }
        UnitPhase::from_angle(self.angle() * k as f64)
    }

    pub fn conj(self) -> Self {
        UnitPhase(self.0.conj())
    }
}

impl Mul for UnitPhase {
    type Output = UnitPhase;
    fn mul(self, rhs: UnitPhase) -> UnitPhase {
        UnitPhase(self.0 * rhs.0)
    }
}

impl MulAssign for UnitPhase {
    fn mul_assign(&mut self, rhs: UnitPhase) {
        self.0 *= rhs.0;
    }
}

impl Mul<Complex64> for UnitPhase {
    type Output = Complex64;
    fn mul(self, rhs: Complex64) -> Complex64 {
        self.0 * rhs
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> Result<i8, ArithmeticError> {
    if n <= 0 || n % 2 == 0 {
        return Err(ArithmeticError::InvalidModulus(n));
    }
    guard(a)?;
    guard(n)?;
    Ok(jacobi_unchecked(a, n))
}

/// Binary Jacobi algorithm; caller guarantees `n` odd and positive.
pub(crate) fn jacobi_unchecked(a: i64, n: i64) -> i8 {
    let mut a = a.rem_euclid(n) as u64;
    let mut n = n as u64;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        // (2/n) = -1 iff n = 3, 5 mod 8
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        // reciprocity
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// `ε_u`: 1 if `u ≡ 1 (mod 4)`, `i` if `u ≡ 3 (mod 4)`.
pub fn epsilon(u: i64) -> Result<UnitPhase, ArithmeticError> {
    if u % 2 == 0 {
        return Err(ArithmeticError::EvenArgument(u));
    }
    Ok(if u.rem_euclid(4) == 1 {
        UnitPhase::ONE
    } else {
        UnitPhase::I
    })
}

/// Quadratic Gauss sum `g(m/n) = Σ_{a mod n} e^{2πi a² m / n}` by direct summation.
pub fn gauss_sum(m: i64, n: i64) -> Result<Complex64, ArithmeticError> {
    if n < 1 {
        return Err(ArithmeticError::NonPositive(n));
    }
    guard(m)?;
    guard(n)?;
    let n128 = n as i128;
    let m_red = (m as i128).rem_euclid(n128);
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 0..n128 {
        let r = (a * a % n128) * m_red % n128;
        sum += Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64);
    }
    Ok(sum)
}

/// `G(m/n) = g(m/n) / |g(m/n)|`.
pub fn normalized_gauss_sum(m: i64, n: i64) -> Result<UnitPhase, ArithmeticError> {
    let g = gauss_sum(m, n)?;
    // Nonvanishing Gauss sums have modulus at least 1.
    if g.norm() < 1e-6 {
        return Err(ArithmeticError::VanishingGaussSum { m, n });
    }
    Ok(UnitPhase::normalize(g).expect("nonzero"))
}

/// Möbius function by trial division.
pub fn moebius(n: u64) -> Result<i8, ArithmeticError> {
    if n == 0 {
        return Err(ArithmeticError::NonPositive(0));
    }
    guard(n as i64)?;
    let mut n = n;
    let mut mu = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Ok(0);
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    Ok(mu)
}

/// One step `ℓ = p^{2v} · ℓ₀` with `p² ∤ ℓ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSquareStep {
    pub prime: u64,
    pub exponent: u32,
    /// `ℓ₀`, the value left after removing `p^{2v}` from the current index.
    pub cofactor: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarefreeDecomposition {
    pub original: u64,
    pub squarefree_part: u64,
    /// Steps in increasing prime order; each step's cofactor is the next
    /// step's starting value.
    pub ladder: Vec<PrimeSquareStep>,
}

impl SquarefreeDecomposition {
    pub fn is_squarefree(&self) -> bool {
        self.ladder.is_empty()
    }
}

/// Strips square prime powers from `ℓ`, smallest prime first.
pub fn squarefree_decompose(l: u64) -> Result<SquarefreeDecomposition, ArithmeticError> {
    if l == 0 {
        return Err(ArithmeticError::NonPositive(0));
    }
    guard(l as i64)?;
    let mut current = l;
    let mut rest = l;
    let mut ladder = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            let v = e / 2;
            if v > 0 {
                current /= p.pow(2 * v);
                ladder.push(PrimeSquareStep {
                    prime: p,
                    exponent: v,
                    cofactor: current,
                });
            }
        }
        p += 1;
    }
    Ok(SquarefreeDecomposition {
        original: l,
        squarefree_part: current,
        ladder,
    })
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn residues(p: i64) -> Vec<i64> {
        let mut r: Vec<i64> = (1..p).map(|a| a * a % p).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 1).unwrap(), 1);
        assert_eq!(residues(5), vec![1, 4]);
        assert_eq!(jacobi(3, 5).unwrap(), -1);
        assert_eq!(jacobi(6, 15).unwrap(), 0);
        assert_eq!(jacobi(-1, 3).unwrap(), -1);
        assert_eq!(jacobi(0, 1).unwrap(), 1);
    }

    #[test]
    fn jacobi_rejects_bad_modulus() {
        assert_eq!(jacobi(3, 4), Err(ArithmeticError::InvalidModulus(4)));
        assert_eq!(jacobi(3, 0), Err(ArithmeticError::InvalidModulus(0)));
        assert_eq!(jacobi(3, -7), Err(ArithmeticError::InvalidModulus(-7)));
        assert!(matches!(
            jacobi(1 << 40, 7),
            Err(ArithmeticError::OutOfRange(_))
        ));
    }

    #[test]
    fn jacobi_is_multiplicative() {
        for a in -50..=50i64 {
            for b in -50..=50i64 {
                for n in (1..=99).step_by(2) {
                    assert_eq!(
                        jacobi(a * b, n).unwrap(),
                        jacobi(a, n).unwrap() * jacobi(b, n).unwrap()
                    );
                }
            }
            for m in (1..=99).step_by(2) {
                for n in (1..=99).step_by(2) {
                    assert_eq!(
                        jacobi(a, m * n).unwrap(),
                        jacobi(a, m).unwrap() * jacobi(a, n).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_matches_residue_brute_force() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97, 101] {
            let qr = residues(p);
            for a in -120..120i64 {
                if a.rem_euclid(p) == 0 {
                    assert_eq!(jacobi(a, p).unwrap(), 0);
                    continue;
                }
                let expected = if qr.contains(&a.rem_euclid(p)) { 1 } else { -1 };
                assert_eq!(jacobi(a, p).unwrap(), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(1).unwrap(), UnitPhase::ONE);
        assert_eq!(epsilon(7).unwrap(), UnitPhase::I);
        assert_eq!(epsilon(9).unwrap(), UnitPhase::ONE);
        assert_eq!(epsilon(4), Err(ArithmeticError::EvenArgument(4)));
    }

    #[test]
    fn epsilon_squared_is_jacobi_of_minus_one() {
        for u in (1..=999).step_by(2) {
            let e2 = epsilon(u).unwrap().pow(2).value();
            assert_eq!(e2, Complex64::new(jacobi(-1, u).unwrap() as f64, 0.0));
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let g1 = gauss_sum(1, 1).unwrap();
        assert_abs_diff_eq!(g1.re, 1.0, epsilon = 1e-14);
        let g4 = gauss_sum(1, 4).unwrap();
        assert_abs_diff_eq!(g4.re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g4.im, 2.0, epsilon = 1e-12);
        let big_g = normalized_gauss_sum(1, 4).unwrap();
        assert_abs_diff_eq!(big_g.angle(), PI / 4.0, epsilon = 1e-12);
        let g3 = gauss_sum(1, 3).unwrap();
        assert_abs_diff_eq!(g3.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g3.im, 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn vanishing_gauss_sum_is_reported() {
        assert_abs_diff_eq!(gauss_sum(1, 2).unwrap().norm(), 0.0, epsilon = 1e-12);
        assert_eq!(
            normalized_gauss_sum(1, 2),
            Err(ArithmeticError::VanishingGaussSum { m: 1, n: 2 })
        );
        assert!(gauss_sum(1, 0).is_err());
    }

    #[test]
    fn gauss_sum_modulus_for_odd_coprime() {
        for n in (1..=199).step_by(2) {
            for m in [1i64, 2, -3, 5, 7, -11] {
                if gcd(m, n) != 1 {
                    continue;
                }
                let g = gauss_sum(m, n).unwrap();
                assert!((g.norm() - (n as f64).sqrt()).abs() < 1e-9, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(4).unwrap(), 0);
        assert_eq!(moebius(6).unwrap(), 1);
        assert_eq!(moebius(30).unwrap(), -1);
        assert!(moebius(0).is_err());
    }

    #[test]
    fn moebius_matches_sieve() {
        const N: usize = 10_000;
        let mut mu = vec![1i8; N + 1];
        let mut composite = vec![false; N + 1];
        for p in 2..=N {
            if composite[p] {
                continue;
            }
            for m in (p..=N).step_by(p) {
                if m > p {
                    composite[m] = true;
                }
                mu[m] = -mu[m];
            }
            let sq = p * p;
            if sq <= N {
                for m in (sq..=N).step_by(sq) {
                    mu[m] = 0;
                }
            }
        }
        for (n, &expected) in mu.iter().enumerate().skip(1) {
            assert_eq!(moebius(n as u64).unwrap(), expected, "n={n}");
        }
    }

    #[test]
    fn squarefree_examples() {
        let d = squarefree_decompose(1).unwrap();
        assert_eq!(d.squarefree_part, 1);
        assert!(d.ladder.is_empty());

        let d = squarefree_decompose(12).unwrap();
        assert_eq!(d.squarefree_part, 3);
        assert_eq!(
            d.ladder,
            vec![PrimeSquareStep {
                prime: 2,
                exponent: 1,
                cofactor: 3
            }]
        );

        let d = squarefree_decompose(200).unwrap();
        assert_eq!(d.squarefree_part, 2);
        let pv: Vec<_> = d.ladder.iter().map(|s| (s.prime, s.exponent)).collect();
        assert_eq!(pv, vec![(2, 1), (5, 1)]);
        assert_eq!(d.ladder[0].cofactor, 50);
        assert_eq!(d.ladder[1].cofactor, 2);
    }

    #[test]
    fn squarefree_reconstructs() {
        for l in 1..=5000u64 {
            let d = squarefree_decompose(l).unwrap();
            let prod: u64 = d
                .ladder
                .iter()
                .map(|s| s.prime.pow(2 * s.exponent))
                .product::<u64>()
                * d.squarefree_part;
            assert_eq!(prod, l);
            assert_ne!(moebius(d.squarefree_part).unwrap(), 0);
        }
    }
}
