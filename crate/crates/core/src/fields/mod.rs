//! Exact coefficient fields: `Q` with the height measure, `F_p`, and `F_{p^k}`.
//!
//! Polynomial code is generic over [`Coefficient`]; the concrete types are
//! [`Rational`], [`Fp`] and [`Fq`]. [`FieldElement`] is the tagged union used
//! where the field is only known at run time (file formats, formula tensors).

mod extension;
mod prime;
mod rational;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use extension::{ExtensionField, Fq};
pub use prime::{Fp, PrimeField};
pub use rational::{PMeasure, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported range (< 2^32)")]
    ModulusTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus is not a monic irreducible polynomial")]
    ReducibleModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("denominator of {value} is divisible by {p}")]
    DenominatorDivisibleByP { value: String, p: u64 },
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Arithmetic needed by polynomial and Gröbner code.
///
/// Field context (the modulus of `F_p`, say) lives inside each element, so
/// constants are produced from an existing element via `zero_like` / `one_like`.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `None` for zero.
    fn inverse(&self) -> Option<Self>;
    fn from_i64_like(&self, n: i64) -> Self;
    /// Height `max(|a|, |b|)`; defined only for rationals.
    fn p_measure(&self) -> Option<PMeasure> {
        None
    }
}

/// Run-time description of a coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    Prime(PrimeField),
    Extension(Arc<ExtensionField>),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        PrimeField::new(p).map(Field::Prime)
    }

    /// `F_{p^k}`; `k = 1` yields the prime field itself.
    pub fn finite(p: u64, k: usize) -> Result<Field, FieldError> {
        if k == 1 {
            Field::prime(p)
        } else {
            ExtensionField::new(p, k).map(|f| Field::Extension(Arc::new(f)))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(f) => f.p(),
            Field::Extension(f) => f.p(),
        }
    }

    /// Number of elements, `None` for `Q` or when it overflows `u64`.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Prime(f) => Some(f.p()),
            Field::Extension(f) => f.order(),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Field::Rational)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match self {
            Field::Rational => FieldElement::Rational(Rational::from_integer(n)),
            Field::Prime(f) => FieldElement::Prime(f.elem(n)),
            Field::Extension(f) => FieldElement::Ext(f.constant(n)),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    /// Image of a rational number; fails when `p` divides the denominator.
    pub fn from_rational(&self, x: &Rational) -> Result<FieldElement, FieldError> {
        match self {
            Field::Rational => Ok(FieldElement::Rational(x.clone())),
            _ => {
                let p = self.characteristic();
                let pb = BigInt::from(p);
                let den = x.denom().mod_floor(&pb);
                if den.is_zero() {
                    return Err(FieldError::DenominatorDivisibleByP {
                        value: x.to_string(),
                        p,
                    });
                }
                let num = x.numer().mod_floor(&pb).to_i64().expect("residue fits");
                let den = den.to_i64().expect("residue fits");
                let num = self.from_i64(num);
                let den = self.from_i64(den);
                num.try_div(&den)
            }
        }
    }

    /// Every element in base-`p` positional order, `None` for `Q`.
    pub fn enumerate(&self) -> Option<Vec<FieldElement>> {
        match self {
            Field::Rational => None,
            Field::Prime(f) => Some(f.enumerate().map(FieldElement::Prime).collect()),
            Field::Extension(f) => Some(f.enumerate().map(FieldElement::Ext).collect()),
        }
    }

    /// Parses an element in the textual form produced by `Display`.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let bad = || FieldError::Parse(s.to_string());
        match self {
            Field::Rational => s.parse().map(FieldElement::Rational),
            Field::Prime(f) => {
                let v: u64 = s.trim().parse().map_err(|_| bad())?;
                if v >= f.p() {
                    return Err(bad());
                }
                Ok(FieldElement::Prime(f.elem(v as i64)))
            }
            Field::Extension(f) => {
                let coeffs: Vec<u64> = s
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?;
                if coeffs.len() != f.degree() || coeffs.iter().any(|&c| c >= f.p()) {
                    return Err(bad());
                }
                Ok(FieldElement::Ext(f.elem(&coeffs)))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(pf) => write!(f, "F_{}", pf.p()),
            Field::Extension(e) => write!(f, "F_{}^{}", e.p(), e.degree()),
        }
    }
}

/// An element of `Q`, `F_p` or `F_{p^k}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(Rational),
    Prime(Fp),
    Ext(Fq),
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Prime(x) => Field::Prime(x.field()),
            FieldElement::Ext(x) => Field::Extension(Arc::clone(x.field())),
        }
    }

    fn mismatch(&self, rhs: &Self) -> FieldError {
        FieldError::FieldMismatch(self.field().to_string(), rhs.field().to_string())
    }

    fn zip<F, G, H>(&self, rhs: &Self, q: F, p: G, e: H) -> Result<Self, FieldError>
    where
        F: FnOnce(&Rational, &Rational) -> Rational,
        G: FnOnce(&Fp, &Fp) -> Fp,
        H: FnOnce(&Fq, &Fq) -> Fq,
    {
        use FieldElement::*;
        match (self, rhs) {
            (Rational(a), Rational(b)) => Ok(Rational(q(a, b))),
            (Prime(a), Prime(b)) if a.modulus() == b.modulus() => Ok(Prime(p(a, b))),
            (Ext(a), Ext(b)) if a.same_field(b) => Ok(Ext(e(a, b))),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.zip(rhs, |a, b| a + b, |a, b| a.plus(b), |a, b| a.plus(b))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.zip(rhs, |a, b| a - b, |a, b| a.minus(b), |a, b| a.minus(b))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.zip(rhs, |a, b| a * b, |a, b| a.times(b), |a, b| a.times(b))
    }

    pub fn try_inv(&self) -> Result<Self, FieldError> {
        self.inverse().ok_or(FieldError::DivisionByZero)
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        if self.field() != rhs.field() {
            return Err(self.mismatch(rhs));
        }
        self.try_mul(&rhs.try_inv()?)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Base-`p` positional index inside a finite field.
    pub fn index(&self) -> Option<u64> {
        match self {
            FieldElement::Rational(_) => None,
            FieldElement::Prime(x) => Some(x.value()),
            FieldElement::Ext(x) => Some(x.index()),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(x) => x.fmt(f),
            FieldElement::Prime(x) => x.fmt(f),
            FieldElement::Ext(x) => x.fmt(f),
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(x) => write!(f, "{x:?}"),
            FieldElement::Prime(x) => write!(f, "{x:?}"),
            FieldElement::Ext(x) => write!(f, "{x:?}"),
        }
    }
}

impl From<Rational> for FieldElement {
    fn from(x: Rational) -> Self {
        FieldElement::Rational(x)
    }
}

impl From<Fp> for FieldElement {
    fn from(x: Fp) -> Self {
        FieldElement::Prime(x)
    }
}

impl From<Fq> for FieldElement {
    fn from(x: Fq) -> Self {
        FieldElement::Ext(x)
    }
}

// Panicking variant for polynomial arithmetic: mixing fields inside one
// polynomial ring is a programming error, the checked `try_*` methods are
// the public surface for untrusted operands.
impl Coefficient for FieldElement {
    fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(x) => x.is_zero(),
            FieldElement::Prime(x) => x.is_zero(),
            FieldElement::Ext(x) => x.is_zero(),
        }
    }
    fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(x) => x.is_one(),
            FieldElement::Prime(x) => x.is_one(),
            FieldElement::Ext(x) => x.is_one(),
        }
    }
    fn zero_like(&self) -> Self {
        self.from_i64_like(0)
    }
    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.try_add(rhs).unwrap()
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).unwrap()
    }
    fn times(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).unwrap()
    }
    fn negate(&self) -> Self {
        match self {
            FieldElement::Rational(x) => FieldElement::Rational(-x),
            FieldElement::Prime(x) => FieldElement::Prime(x.negate()),
            FieldElement::Ext(x) => FieldElement::Ext(x.negate()),
        }
    }
    fn inverse(&self) -> Option<Self> {
        match self {
            FieldElement::Rational(x) => x.inverse().map(FieldElement::Rational),
            FieldElement::Prime(x) => x.inverse().map(FieldElement::Prime),
            FieldElement::Ext(x) => x.inverse().map(FieldElement::Ext),
        }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        match self {
            FieldElement::Rational(x) => FieldElement::Rational(x.from_i64_like(n)),
            FieldElement::Prime(x) => FieldElement::Prime(x.from_i64_like(n)),
            FieldElement::Ext(x) => FieldElement::Ext(x.from_i64_like(n)),
        }
    }
    fn p_measure(&self) -> Option<PMeasure> {
        self.as_rational().map(Rational::p_measure)
    }
}
