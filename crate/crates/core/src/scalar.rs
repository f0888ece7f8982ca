//! Real, complex and quaternion scalars.
//!
//! A [`Scalar`] is stored as four binary64 coordinates `x + y·i + u·j + v·k`
//! together with its [`Kind`]. Coordinates that the kind does not use are
//! always `+0.0`, so a real scalar is bit-for-bit a real number padded with
//! zeros. Arithmetic promotes along `Real ⊂ Complex ⊂ Quaternion`; quaternion
//! products use the Hamilton convention (`i·j = k`, `j·i = -k`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The division algebra a scalar lives in, ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Real,
    Complex,
    Quaternion,
}

impl Kind {
    /// Real dimension of the algebra (1, 2 or 4).
    pub fn dim(self) -> usize {
        match self {
            Kind::Real => 1,
            Kind::Complex => 2,
            Kind::Quaternion => 4,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct Scalar {
    kind: Kind,
    c: [f64; 4],
}

impl Scalar {
    pub const ZERO: Scalar = Scalar::real(0.0);
    pub const ONE: Scalar = Scalar::real(1.0);

    pub const fn real(x: f64) -> Self {
        Scalar {
            kind: Kind::Real,
            c: [x, 0.0, 0.0, 0.0],
        }
    }

    pub const fn complex(x: f64, y: f64) -> Self {
        Scalar {
            kind: Kind::Complex,
            c: [x, y, 0.0, 0.0],
        }
    }

    pub const fn quaternion(x: f64, y: f64, u: f64, v: f64) -> Self {
        Scalar {
            kind: Kind::Quaternion,
            c: [x, y, u, v],
        }
    }

    /// Zero of the given kind.
    pub const fn zero(kind: Kind) -> Self {
        Scalar { kind, c: [0.0; 4] }
    }

    /// One of the given kind.
    pub const fn one(kind: Kind) -> Self {
        Scalar {
            kind,
            c: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Builds a scalar from raw coordinates, rejecting nonzero coordinates the
    /// kind does not use.
    pub fn from_components(kind: Kind, c: [f64; 4]) -> Result<Self> {
        if c[kind.dim()..].iter().any(|&t| t != 0.0) {
            return Err(Error::domain(format!(
                "{kind:?} scalar has nonzero unused components {c:?}"
            )));
        }
        let mut s = Scalar::zero(kind);
        s.c[..kind.dim()].copy_from_slice(&c[..kind.dim()]);
        Ok(s)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Coordinates `[x, y, u, v]`.
    pub fn components(&self) -> [f64; 4] {
        self.c
    }

    pub fn re(&self) -> f64 {
        self.c[0]
    }

    /// Same value viewed in a larger algebra. Never demotes.
    pub fn promote(self, kind: Kind) -> Self {
        Scalar {
            kind: self.kind.max(kind),
            c: self.c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&t| t == 0.0)
    }

    /// `|x| + |y| + |u| + |v|`; the LAPACK `CABS1` comparison magnitude,
    /// extended to quaternions by summing all four coordinates.
    pub fn l1_magnitude(&self) -> f64 {
        match self.kind {
            Kind::Real => self.c[0].abs(),
            Kind::Complex => self.c[0].abs() + self.c[1].abs(),
            Kind::Quaternion => self.c.iter().map(|t| t.abs()).sum(),
        }
    }

    /// Euclidean norm of the coordinate vector.
    pub fn modulus(&self) -> f64 {
        match self.kind {
            Kind::Real => self.c[0].abs(),
            Kind::Complex => self.c[0].hypot(self.c[1]),
            Kind::Quaternion => self.norm_sqr().sqrt(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|t| t * t).sum()
    }

    pub fn conjugate(&self) -> Self {
        let [x, y, u, v] = self.c;
        match self.kind {
            Kind::Real => *self,
            Kind::Complex => Scalar::complex(x, -y),
            Kind::Quaternion => Scalar::quaternion(x, -y, -u, -v),
        }
    }

    /// Multiplicative inverse `conj(s) / |s|²`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("zero divisor"));
        }
        if self.kind == Kind::Real {
            return Ok(Scalar::real(1.0 / self.c[0]));
        }
        Ok(self.conjugate().scale(1.0 / self.norm_sqr()))
    }

    /// Multiplies every coordinate by a real factor.
    pub fn scale(&self, f: f64) -> Self {
        let mut out = Scalar::zero(self.kind);
        for (o, t) in out.c[..self.kind.dim()].iter_mut().zip(&self.c) {
            *o = t * f;
        }
        out
    }

    /// Product `self · rhs` in the larger of the two algebras.
    pub fn multiply(&self, rhs: &Scalar) -> Scalar {
        let [a1, b1, c1, d1] = self.c;
        let [a2, b2, c2, d2] = rhs.c;
        match self.kind.max(rhs.kind) {
            Kind::Real => Scalar::real(a1 * a2),
            Kind::Complex => Scalar::complex(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2),
            Kind::Quaternion => Scalar::quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            ),
        }
    }

    fn zip_with(&self, rhs: &Scalar, f: impl Fn(f64, f64) -> f64) -> Scalar {
        let kind = self.kind.max(rhs.kind);
        let mut out = Scalar::zero(kind);
        for i in 0..kind.dim() {
            out.c[i] = f(self.c[i], rhs.c[i]);
        }
        out
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::ZERO
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(-1.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.multiply(&rhs)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::real(x)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, u, v] = self.c;
        match self.kind {
            Kind::Real => write!(f, "{x}"),
            Kind::Complex => write!(f, "{x}{y:+}i"),
            Kind::Quaternion => write!(f, "{x}{y:+}i{u:+}j{v:+}k"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Scalar = Scalar::quaternion(0.0, 1.0, 0.0, 0.0);
    const J: Scalar = Scalar::quaternion(0.0, 0.0, 1.0, 0.0);
    const K: Scalar = Scalar::quaternion(0.0, 0.0, 0.0, 1.0);

    #[test]
    fn l1_examples() {
        assert_eq!(Scalar::complex(3.0, 4.0).l1_magnitude(), 7.0);
        assert_eq!(Scalar::real(-5.0).l1_magnitude(), 5.0);
        assert_eq!(Scalar::complex(1.0, 1.0).l1_magnitude(), 2.0);
        assert_eq!(Scalar::quaternion(1.0, -2.0, 3.0, -4.0).l1_magnitude(), 10.0);
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(Scalar::complex(3.0, 4.0).modulus(), 5.0);
        assert_eq!(Scalar::quaternion(1.0, 1.0, 1.0, 1.0).modulus(), 2.0);
        assert_eq!(Scalar::ZERO.modulus(), 0.0);
        assert_eq!(Scalar::zero(Kind::Quaternion).modulus(), 0.0);
    }

    #[test]
    fn hamilton_convention() {
        assert_eq!(I * J, K);
        assert_eq!(J * I, -K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(I * I, Scalar::quaternion(-1.0, 0.0, 0.0, 0.0));
        assert_ne!(I * J, J * I);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Scalar::real(2.0).invert().unwrap(), Scalar::real(0.5));
        let s = Scalar::complex(1.0, 2.0);
        let p = s * s.invert().unwrap();
        assert!((p.re() - 1.0).abs() < 1e-15);
        assert!(p.components()[1].abs() < 1e-15);
        assert_eq!(p.kind(), Kind::Complex);
    }

    #[test]
    fn invert_zero_is_domain_error() {
        for kind in [Kind::Real, Kind::Complex, Kind::Quaternion] {
            let err = Scalar::zero(kind).invert().unwrap_err();
            assert!(err.to_string().contains("zero divisor"));
        }
    }

    #[test]
    fn promotion_keeps_unused_components_zero() {
        let p = Scalar::real(2.0) * Scalar::complex(1.0, -1.0);
        assert_eq!(p.kind(), Kind::Complex);
        assert_eq!(p.components(), [2.0, -2.0, 0.0, 0.0]);
        let q = Scalar::complex(0.0, 1.0) + J;
        assert_eq!(q.kind(), Kind::Quaternion);
        assert_eq!(q.components(), [0.0, 1.0, 1.0, 0.0]);
        // complex product never leaks into j/k
        let c = Scalar::complex(-1.5, 2.0) * Scalar::complex(0.25, -3.0);
        assert_eq!(&c.components()[2..], &[0.0, 0.0]);
        assert!(c.components()[2].is_sign_positive());
    }

    #[test]
    fn from_components_rejects_dirty_padding() {
        assert!(Scalar::from_components(Kind::Real, [1.0, 0.0, 0.0, 0.0]).is_ok());
        assert!(Scalar::from_components(Kind::Real, [1.0, 1e-300, 0.0, 0.0]).is_err());
        assert!(Scalar::from_components(Kind::Complex, [1.0, 2.0, 0.0, 3.0]).is_err());
    }

    fn any_scalar() -> impl Strategy<Value = Scalar> {
        let c = -10.0..10.0f64;
        prop_oneof![
            c.clone().prop_map(Scalar::real),
            (c.clone(), c.clone()).prop_map(|(x, y)| Scalar::complex(x, y)),
            (c.clone(), c.clone(), c.clone(), c).prop_map(|(x, y, u, v)| Scalar::quaternion(x, y, u, v)),
        ]
    }

    fn rel_close(a: Scalar, b: Scalar, tol: f64) -> bool {
        let scale = a.modulus().max(b.modulus()).max(1e-300);
        (a - b).modulus() <= tol * scale
    }

    proptest! {
        #[test]
        fn conjugate_is_involution(s in any_scalar()) {
            prop_assert_eq!(s.conjugate().conjugate(), s);
        }

        #[test]
        fn modulus_nonnegative_zero_iff_zero(s in any_scalar()) {
            prop_assert!(s.modulus() >= 0.0);
            prop_assert_eq!(s.modulus() == 0.0, s.is_zero());
        }

        #[test]
        fn norm_equivalence(s in any_scalar()) {
            prop_assume!(!s.is_zero());
            let d = s.kind().dim() as f64;
            let m = s.modulus();
            let l1 = s.l1_magnitude();
            prop_assert!(m <= l1 * (1.0 + 1e-15));
            prop_assert!(l1 <= d.sqrt() * m * (1.0 + 1e-15));
        }

        #[test]
        fn multiply_is_associative(a in any_scalar(), b in any_scalar(), c in any_scalar()) {
            let left = (a * b) * c;
            let right = a * (b * c);
            let scale = a.modulus() * b.modulus() * c.modulus();
            prop_assert!((left - right).modulus() <= 1e-14 * scale.max(1e-300));
        }

        #[test]
        fn modulus_is_multiplicative(a in any_scalar(), b in any_scalar()) {
            let lhs = (a * b).modulus();
            let rhs = a.modulus() * b.modulus();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }

        #[test]
        fn inverse_is_two_sided(s in any_scalar()) {
            prop_assume!(s.modulus() > 1e-3);
            let inv = s.invert().unwrap();
            prop_assert!(rel_close(s * inv, Scalar::one(s.kind()), 1e-14));
            prop_assert!(rel_close(inv * s, Scalar::one(s.kind()), 1e-14));
        }
    }
}
