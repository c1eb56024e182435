//! The six regions of the fundamental domain `F_∞` of `Γ₀(4)`, the Möbius maps
//! carrying `F_∞` to the domains `F_0` and `F_½` of the other two cusps, and
//! numerical checks of the automorphy relations between the three series.

use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::UnitPhase;
use crate::series::{
    eval_lattice, ComplexPoint, EvalResult, LatticeOptions, Series, SeriesError, TruncationPolicy,
    Weight,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("point {x} + {y}i is a pole of the map")]
    Pole { x: f64, y: f64 },
    #[error("image {x} + {y}i leaves the upper half-plane")]
    LeavesHalfPlane { x: f64, y: f64 },
    #[error("matrix has zero determinant")]
    Singular,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Y,
    P,
    O,
    G,
    B,
    N,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::Y,
        Region::P,
        Region::O,
        Region::G,
        Region::B,
        Region::N,
    ];

    pub fn contains(self, z: ComplexPoint) -> bool {
        let (x, y) = (z.x, z.y);
        // |z − c|² compared against r², so every test is a polynomial inequality.
        let d2 = |c: f64| (x - c) * (x - c) + y * y;
        match self {
            Region::Y => x.abs() <= 0.5 && d2(0.0) >= 1.0,
            Region::P => d2(0.0) < 1.0 && d2(-1.0) >= 1.0 && d2(1.0) >= 1.0,
            Region::O => x >= -0.5 && d2(-1.0) < 1.0 && d2(-1.0 / 3.0) >= 1.0 / 9.0,
            Region::G => x <= 0.5 && d2(1.0 / 3.0) >= 1.0 / 9.0 && d2(1.0) < 1.0,
            Region::B => d2(1.0 / 3.0) < 1.0 / 9.0 && d2(0.2) >= 0.04 && d2(2.0 / 3.0) >= 1.0 / 9.0,
            Region::N => x <= 0.5 && d2(2.0 / 3.0) < 1.0 / 9.0 && d2(0.375) >= 1.0 / 64.0,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The region of `F_∞` containing `z`, if any.
pub fn classify_region(z: ComplexPoint) -> Option<Region> {
    Region::ALL.into_iter().find(|r| r.contains(z))
}

/// Every region whose inequalities `z` satisfies. More than one entry would
/// mean the regions overlap.
pub fn regions_containing(z: ComplexPoint) -> Vec<Region> {
    Region::ALL.into_iter().filter(|r| r.contains(z)).collect()
}

/// Integer 2×2 matrix acting by linear fractional transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Matrix2 {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2 { a, b, c, d }
    }

    /// `S(z) = −1/z`.
    pub const S: Matrix2 = Matrix2::new(0, -1, 1, 0);
    /// `T(z) = z + 1`.
    pub const T: Matrix2 = Matrix2::new(1, 1, 0, 1);

    pub fn det(self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn pow(self, n: u32) -> Self {
        (0..n).fold(Matrix2::new(1, 0, 0, 1), |acc, _| acc * self)
    }

    /// Adjugate; acts as the inverse transformation.
    pub fn adjugate(self) -> Self {
        Matrix2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn apply(self, z: Complex64) -> Option<Complex64> {
        let den = z * self.c as f64 + self.d as f64;
        if den.norm() == 0.0 {
            return None;
        }
        Some((z * self.a as f64 + self.b as f64) / den)
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        Matrix2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// `z ↦ M(z) + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub matrix: Matrix2,
    pub shift: f64,
}

impl MoebiusMap {
    pub fn new(matrix: Matrix2, shift: f64) -> Result<Self, DomainError> {
        if matrix.det() == 0 {
            return Err(DomainError::Singular);
        }
        Ok(MoebiusMap { matrix, shift })
    }

    /// `z ↦ ¼ S(z) = −1/(4z)`, from `F_∞` to `F_0`.
    pub fn to_f0() -> Self {
        MoebiusMap {
            matrix: Matrix2::new(1, 0, 0, 4) * Matrix2::S,
            shift: 0.0,
        }
    }

    /// `z ↦ −ST²S(z) + ½ = z/(1 − 2z) + ½`, from `F_∞` to `F_½`.
    pub fn to_fhalf() -> Self {
        let m = -(Matrix2::S * Matrix2::T.pow(2) * Matrix2::S);
        MoebiusMap {
            matrix: m,
            shift: 0.5,
        }
    }

    /// Composition `self ∘ inner`; defined when `inner` has no shift.
    pub fn compose(self, inner: MoebiusMap) -> Option<Self> {
        (inner.shift == 0.0).then(|| MoebiusMap {
            matrix: self.matrix * inner.matrix,
            shift: self.shift,
        })
    }

    pub fn apply(&self, z: ComplexPoint) -> Result<ComplexPoint, DomainError> {
        let w = self
            .matrix
            .apply(z.to_complex())
            .ok_or(DomainError::Pole { x: z.x, y: z.y })?;
        to_point(w + self.shift)
    }

    pub fn invert(&self, w: ComplexPoint) -> Result<ComplexPoint, DomainError> {
        let z = self
            .matrix
            .adjugate()
            .apply(w.to_complex() - self.shift)
            .ok_or(DomainError::Pole { x: w.x, y: w.y })?;
        to_point(z)
    }
}

fn to_point(w: Complex64) -> Result<ComplexPoint, DomainError> {
    ComplexPoint::from_complex(w).map_err(|_| DomainError::LeavesHalfPlane { x: w.re, y: w.im })
}

pub fn map_to_f0(z: ComplexPoint) -> Result<ComplexPoint, DomainError> {
    MoebiusMap::to_f0().apply(z)
}

pub fn map_from_f0(w: ComplexPoint) -> Result<ComplexPoint, DomainError> {
    MoebiusMap::to_f0().invert(w)
}

pub fn map_to_fhalf(z: ComplexPoint) -> Result<ComplexPoint, DomainError> {
    MoebiusMap::to_fhalf().apply(z)
}

pub fn map_from_fhalf(w: ComplexPoint) -> Result<ComplexPoint, DomainError> {
    MoebiusMap::to_fhalf().invert(w)
}

/// `||z − ¼| − ¼|`.
pub fn circle_deviation(z: ComplexPoint) -> f64 {
    ((z.to_complex() - 0.25).norm() - 0.25).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// `E_0(−1/4z) = (4z)^{k/2} i^{−k} E_∞(z)`
    Eq5,
    /// `E_½(z + ½) = 2^{k/2} (2z+1)^{−k/2} E_∞(z/(2z+1))`
    Eq6,
    /// `E_½(z) = i^{−k} E_½(z+1)`
    Eq7,
    /// `E_½(z) = (2z+1)^{−k/2} E_0(z/(2z+1))`
    Eq8,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Eq5, Relation::Eq6, Relation::Eq7, Relation::Eq8];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub relation: Relation,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs − rhs| / max(|lhs|, |rhs|)`.
    pub residual: f64,
    pub certified: bool,
}

fn eval(
    series: Series,
    w: Complex64,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<EvalResult, DomainError> {
    Ok(eval_lattice(
        series,
        to_point(w)?,
        k,
        policy,
        LatticeOptions::default(),
    )?)
}

/// `w^{−k/2}` on the principal branch.
fn inv_half_power(w: Complex64, k: Weight) -> Complex64 {
    (-k.half() * w.ln()).exp()
}

pub fn relation_residual(
    which: Relation,
    z: ComplexPoint,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<RelationResidual, DomainError> {
    let zc = z.to_complex();
    let s = k.half();
    let i_minus_k = UnitPhase::I.pow(-k.k());
    let (lhs, rhs) = match which {
        Relation::Eq5 => {
            let l = eval(Series::EZero, -1.0 / (4.0 * zc), k, policy)?;
            let r = eval(Series::EInfinity, zc, k, policy)?;
            let factor = i_minus_k * (s * (4.0 * zc).ln()).exp();
            (l, (factor * r.value, r.certified))
        }
        Relation::Eq6 => {
            let l = eval(Series::EHalf, zc + 0.5, k, policy)?;
            let w = 2.0 * zc + 1.0;
            let r = eval(Series::EInfinity, zc / w, k, policy)?;
            let factor = (s * std::f64::consts::LN_2).exp() * inv_half_power(w, k);
            (l, (factor * r.value, r.certified))
        }
        Relation::Eq7 => {
            let l = eval(Series::EHalf, zc, k, policy)?;
            let r = eval(Series::EHalf, zc + 1.0, k, policy)?;
            (l, (i_minus_k * r.value, r.certified))
        }
        Relation::Eq8 => {
            let l = eval(Series::EHalf, zc, k, policy)?;
            let w = 2.0 * zc + 1.0;
            let r = eval(Series::EZero, zc / w, k, policy)?;
            (l, (inv_half_power(w, k) * r.value, r.certified))
        }
    };
    let (l, (r, r_cert)) = (lhs, rhs);
    let denom = l.value.norm().max(r.norm());
    Ok(RelationResidual {
        relation: which,
        lhs: l.value,
        rhs: r,
        residual: if denom == 0.0 {
            0.0
        } else {
            (l.value - r).norm() / denom
        },
        certified: l.certified && r_cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> ComplexPoint {
        ComplexPoint::new(x, y).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_region(pt(0.0, 1.0)), Some(Region::Y));
        assert_eq!(classify_region(pt(0.33, 0.2)), Some(Region::B));
        assert_eq!(classify_region(pt(0.1, 0.01)), None);
        assert_eq!(classify_region(pt(0.0, 0.5)), Some(Region::P));
        assert_eq!(classify_region(pt(-0.45, 0.45)), Some(Region::O));
        assert_eq!(classify_region(pt(0.45, 0.4)), Some(Region::G));
        assert_eq!(classify_region(pt(0.45, 0.15)), Some(Region::N));
    }

    #[test]
    fn boundaries_follow_printed_inequalities() {
        // |z| = 1 belongs to Y, not P
        assert_eq!(classify_region(pt(0.0, 1.0)), Some(Region::Y));
        // Re z = 1/2 with |z| >= 1 is in Y
        assert_eq!(classify_region(pt(0.5, 2.0)), Some(Region::Y));
        assert_eq!(classify_region(pt(0.6, 2.0)), None);
    }

    #[test]
    fn group_generators() {
        let st2s = Matrix2::S * Matrix2::T.pow(2) * Matrix2::S;
        assert_eq!(st2s, Matrix2::new(-1, 0, 2, -1));
        assert_eq!(st2s.det(), 1);
        assert_eq!(MoebiusMap::to_f0().matrix.det(), 4);
    }

    #[test]
    fn f0_examples() {
        let w = map_to_f0(pt(0.0, 1.0)).unwrap();
        assert!((w.x).abs() < 1e-15 && (w.y - 0.25).abs() < 1e-15);
        let z = map_from_f0(pt(-0.5, 0.5)).unwrap();
        assert!((z.x - 0.25).abs() < 1e-15 && (z.y - 0.25).abs() < 1e-15);
        assert!(circle_deviation(z) < 1e-15);
        let back = map_from_f0(map_to_f0(pt(0.3, 0.7)).unwrap()).unwrap();
        assert!((back.x - 0.3).abs() < 1e-15 && (back.y - 0.7).abs() < 1e-15);
    }

    #[test]
    fn fhalf_examples() {
        let w = map_to_fhalf(pt(0.0, 1.0)).unwrap();
        assert!((w.x - 0.1).abs() < 1e-15 && (w.y - 0.2).abs() < 1e-15);
        let back = map_from_fhalf(map_to_fhalf(pt(-0.2, 0.9)).unwrap()).unwrap();
        assert!((back.x + 0.2).abs() < 1e-15 && (back.y - 0.9).abs() < 1e-15);
        for y in [0.5, 1.0, 3.0] {
            let z = map_from_fhalf(pt(0.5, y)).unwrap();
            assert!(circle_deviation(z) < 1e-15);
        }
    }

    #[test]
    fn pole_is_rejected() {
        assert!(MoebiusMap::to_fhalf()
            .matrix
            .apply(Complex64::new(0.5, 0.0))
            .is_none());
        assert!(MoebiusMap::new(Matrix2::new(1, 2, 2, 4), 0.0).is_err());
    }

    #[test]
    fn relation_examples_k15() {
        let k = Weight::new(15).unwrap();
        let p = TruncationPolicy::default();
        for (rel, z) in [
            (Relation::Eq5, pt(0.0, 1.0)),
            (Relation::Eq6, pt(0.1, 0.9)),
            (Relation::Eq7, pt(0.25, 1.0)),
            (Relation::Eq8, pt(-0.5, 1.0)),
        ] {
            let r = relation_residual(rel, z, k, &p).unwrap();
            assert!(r.certified);
            assert!(r.residual < 1e-8, "{rel:?}: {}", r.residual);
        }
    }
}
