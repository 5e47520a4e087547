//! Conjugation quandle on parabolic vectors.
//!
//! A parabolic vector `(α, β) ∈ ℂ²∖{0}` stands for the parabolic element
//! `[[1+αβ, −α²], [β², 1−αβ]]` of PSL(2,ℂ); it is only defined up to sign, but
//! the stored pair is kept as *the* representative (determinants depend on it).

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Neg;

pub type C64 = Complex64;

/// Threshold for "numerically zero".
pub const TOL_ZERO: f64 = 1e-12;
/// Default tolerance for sign-insensitive equality.
pub const TOL_EQ: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParabolicVector {
    pub alpha: C64,
    pub beta: C64,
}

impl ParabolicVector {
    pub fn new(alpha: C64, beta: C64) -> Self {
        ParabolicVector { alpha, beta }
    }

    pub fn real(alpha: f64, beta: f64) -> Self {
        Self::new(c(alpha, 0.0), c(beta, 0.0))
    }

    /// Largest component modulus; a valid vector has this above [`TOL_ZERO`].
    pub fn norm_inf(&self) -> f64 {
        self.alpha.norm().max(self.beta.norm())
    }

    pub fn is_valid(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.norm_inf() > TOL_ZERO
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(self.alpha * k, self.beta * k)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.alpha - o.alpha, self.beta - o.beta)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.alpha.conj(), self.beta.conj())
    }

    /// Componentwise distance.
    pub fn dist(&self, o: &Self) -> f64 {
        (self.alpha - o.alpha).norm().max((self.beta - o.beta).norm())
    }
}

impl Neg for ParabolicVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.alpha, -self.beta)
    }
}

impl fmt::Display for ParabolicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// `a * b`: the matrix of `b` acting on `a`.
pub fn qop(a: &ParabolicVector, b: &ParabolicVector) -> ParabolicVector {
    let (g, d) = (b.alpha, b.beta);
    let gd = g * d;
    ParabolicVector::new(
        (1.0 + gd) * a.alpha - g * g * a.beta,
        d * d * a.alpha + (1.0 - gd) * a.beta,
    )
}

/// `a *⁻¹ b`, so that `qop(qop_inv(a, b), b) == a`.
pub fn qop_inv(a: &ParabolicVector, b: &ParabolicVector) -> ParabolicVector {
    let (g, d) = (b.alpha, b.beta);
    let gd = g * d;
    ParabolicVector::new(
        (1.0 - gd) * a.alpha + g * g * a.beta,
        -d * d * a.alpha + (1.0 + gd) * a.beta,
    )
}

pub fn det2(a: &ParabolicVector, b: &ParabolicVector) -> C64 {
    a.alpha * b.beta - a.beta * b.alpha
}

/// Equality in (ℂ²∖{0})/±, componentwise within `tol`.
pub fn eq_up_to_sign(a: &ParabolicVector, b: &ParabolicVector, tol: f64) -> bool {
    sign_against(a, b, tol).is_some()
}

/// `Some(ε)` with `a ≈ ε·b`.
pub fn sign_against(a: &ParabolicVector, b: &ParabolicVector, tol: f64) -> Option<i8> {
    if a.dist(b) <= tol {
        Some(1)
    } else if a.dist(&-*b) <= tol {
        Some(-1)
    } else {
        None
    }
}

/// A point of ℂ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(C64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(&self) -> Option<C64> {
        match self {
            ExtendedComplex::Finite(z) => Some(*z),
            ExtendedComplex::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    /// Chordal distance on the Riemann sphere (∞ is at distance 0 from itself).
    pub fn chordal(&self, o: &Self) -> f64 {
        use ExtendedComplex::*;
        match (self, o) {
            (Infinity, Infinity) => 0.0,
            (Finite(z), Infinity) | (Infinity, Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (Finite(z), Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedComplex::Finite(z) => write!(f, "{z}"),
            ExtendedComplex::Infinity => write!(f, "∞"),
        }
    }
}

pub fn hopf(a: &ParabolicVector) -> ExtendedComplex {
    if a.beta.norm() <= TOL_ZERO {
        ExtendedComplex::Infinity
    } else {
        ExtendedComplex::Finite(a.alpha / a.beta)
    }
}

/// Chordal distance between Hopf images, computed without dividing:
/// `2|det(a,b)| / (‖a‖‖b‖)`.
pub fn hopf_distance(a: &ParabolicVector, b: &ParabolicVector) -> f64 {
    let na = (a.alpha.norm_sqr() + a.beta.norm_sqr()).sqrt();
    let nb = (b.alpha.norm_sqr() + b.beta.norm_sqr()).sqrt();
    2.0 * det2(a, b).norm() / (na * nb)
}

pub type Mat2 = [[C64; 2]; 2];

pub fn to_matrix(a: &ParabolicVector) -> Mat2 {
    let (al, be) = (a.alpha, a.beta);
    [[1.0 + al * be, -al * al], [be * be, 1.0 - al * be]]
}

pub fn mat_det(m: &Mat2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Möbius action `(az+b)/(cz+d)` on the extended plane.
pub fn mobius_apply(m: &Mat2, z: ExtendedComplex) -> ExtendedComplex {
    let [[a, b], [cc, d]] = *m;
    let (num, den) = match z {
        ExtendedComplex::Infinity => (a, cc),
        ExtendedComplex::Finite(z) => (a * z + b, cc * z + d),
    };
    if den.norm() <= TOL_ZERO * num.norm().max(1.0) {
        ExtendedComplex::Infinity
    } else {
        ExtendedComplex::Finite(num / den)
    }
}

// JSON: a complex number is `[re, im]` (a bare real is also accepted on input);
// a parabolic vector is `[alpha, beta]`.

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexIn {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexIn> for C64 {
    fn from(v: ComplexIn) -> C64 {
        match v {
            ComplexIn::Real(x) => c(x, 0.0),
            ComplexIn::Pair([re, im]) => c(re, im),
        }
    }
}

impl Serialize for ParabolicVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&[self.alpha.re, self.alpha.im])?;
        t.serialize_element(&[self.beta.re, self.beta.im])?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for ParabolicVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b] = <[ComplexIn; 2]>::deserialize(d)?;
        let v = ParabolicVector::new(a.into(), b.into());
        if !v.is_valid() {
            return Err(de::Error::custom("parabolic vector must be finite and nonzero"));
        }
        Ok(v)
    }
}
