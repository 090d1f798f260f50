use std::cmp::Ordering;
use std::fmt;

use super::{Monomial, PolyError};
use crate::fields::{Coefficient, FieldElement};

#[derive(Clone, PartialEq, Debug)]
pub struct Term<C> {
    pub coeff: C,
    pub mono: Monomial,
}

impl<C: Coefficient> Term<C> {
    pub fn new(coeff: C, mono: Monomial) -> Self {
        Term { coeff, mono }
    }
}

/// Terms are kept strictly decreasing in degrevlex order with no zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: Vec<Term<C>>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(c, Monomial::one(nvars))
    }

    pub fn monomial(c: C, mono: Monomial) -> Self {
        let nvars = mono.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Polynomial {
            nvars,
            terms: vec![Term::new(c, mono)],
        }
    }

    /// The variable `x_i` with coefficient `one`.
    pub fn var(nvars: usize, i: usize, one: C) -> Self {
        Self::monomial(one, Monomial::var(nvars, i))
    }

    /// Builds a canonical polynomial from arbitrary terms (sorted, merged, zeros dropped).
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (C, Monomial)>) -> Self {
        let mut raw: Vec<Term<C>> = terms
            .into_iter()
            .map(|(c, m)| {
                assert_eq!(m.nvars(), nvars, "monomial length");
                Term::new(c, m)
            })
            .collect();
        raw.sort_by(|a, b| b.mono.cmp(&a.mono));
        let mut out: Vec<Term<C>> = Vec::with_capacity(raw.len());
        for t in raw {
            match out.last_mut() {
                Some(last) if last.mono == t.mono => last.coeff = last.coeff.plus(&t.coeff),
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Polynomial { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term<C>> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Initial term `in(f)`.
    pub fn leading_term(&self) -> Option<&Term<C>> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.mono)
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.terms.first().map(|t| &t.coeff)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading_monomial().map(Monomial::degree)
    }

    /// Nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].mono.is_one()
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::RingMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].mono.cmp(&b[j].mono) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate_other {
                        b[j].coeff.negate()
                    } else {
                        b[j].coeff.clone()
                    };
                    out.push(Term::new(c, b[j].mono.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        a[i].coeff.minus(&b[j].coeff)
                    } else {
                        a[i].coeff.plus(&b[j].coeff)
                    };
                    if !c.is_zero() {
                        out.push(Term::new(c, a[i].mono.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate_other {
                t.coeff.negate()
            } else {
                t.coeff.clone()
            };
            out.push(Term::new(c, t.mono.clone()));
        }
        Polynomial {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let products = other.terms.iter().flat_map(|b| {
            self.terms
                .iter()
                .map(move |a| (a.coeff.times(&b.coeff), a.mono.mul(&b.mono)))
        });
        Ok(Self::from_terms(self.nvars, products.collect::<Vec<_>>()))
    }

    /// `c * m * self`. Multiplying by a monomial preserves the term order.
    pub fn mul_term(&self, c: &C, m: &Monomial) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff.times(c), t.mono.mul(m)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.mul_term(c, &Monomial::one(self.nvars))
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff.negate(), t.mono.clone()))
                .collect(),
        }
    }

    /// `self - c * m * g`.
    pub fn sub_scaled(&self, c: &C, m: &Monomial, g: &Self) -> Self {
        self.merge(&g.mul_term(c, m), true)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading_coeff().and_then(Coefficient::inverse) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        // The zero polynomial has no coefficient to take `1` from; 0^0 is left as 0.
        let Some(one) = self.leading_coeff().map(Coefficient::one_like) else {
            return self.clone();
        };
        let mut acc = Self::constant(self.nvars, one);
        for _ in 0..e {
            acc = acc.checked_mul(self).unwrap();
        }
        acc
    }

    pub fn evaluate(&self, point: &[C]) -> Result<C, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let Some(zero) = self
            .leading_coeff()
            .map(|c| c.zero_like())
            .or_else(|| point.first().map(|c| c.zero_like()))
        else {
            return Err(PolyError::UnknownField);
        };
        let mut acc = zero;
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (x, &e) in point.iter().zip(t.mono.exps()) {
                for _ in 0..e {
                    v = v.times(x);
                }
            }
            acc = acc.plus(&v);
        }
        Ok(acc)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|t| (f(&t.coeff), t.mono.clone())),
        )
    }

    pub fn try_map_coeffs<D: Coefficient, E>(
        &self,
        f: impl Fn(&C) -> Result<D, E>,
    ) -> Result<Polynomial<D>, E> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((f(&t.coeff)?, t.mono.clone())))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(Polynomial::from_terms(self.nvars, terms))
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, t) in self.terms.iter().enumerate() {
            let c = t.coeff.to_string();
            let (neg, mag) = match c.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, c),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = t.mono.fmt_with(names);
            if t.mono.is_one() {
                out.push_str(&mag);
            } else if mag == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl Polynomial<FieldElement> {
    /// Evaluation that reports a field mismatch instead of panicking.
    pub fn evaluate_checked(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let field = match (self.leading_coeff(), point.first()) {
            (Some(c), _) => c.field(),
            (None, Some(x)) => x.field(),
            (None, None) => return Err(PolyError::UnknownField),
        };
        let mut acc = field.zero();
        for x in point {
            if x.field() != field {
                return Err(crate::fields::FieldError::FieldMismatch(
                    field.to_string(),
                    x.field().to_string(),
                )
                .into());
            }
        }
        for t in &self.terms {
            if t.coeff.field() != field {
                return Err(crate::fields::FieldError::FieldMismatch(
                    field.to_string(),
                    t.coeff.field().to_string(),
                )
                .into());
            }
            let mut v = t.coeff.clone();
            for (x, &e) in point.iter().zip(t.mono.exps()) {
                for _ in 0..e {
                    v = v.try_mul(x)?;
                }
            }
            acc = acc.try_add(&v)?;
        }
        Ok(acc)
    }
}

impl<C: Coefficient> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&|i| format!("x{i}")))
    }
}

impl<C: Coefficient> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> std::ops::$tr<&Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$checked(rhs).expect("polynomials from different rings")
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl<C: Coefficient> std::ops::Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Field, PrimeField, Rational};

    type Q = Polynomial<Rational>;

    fn vars(n: usize) -> Vec<Q> {
        (0..n).map(|i| Q::var(n, i, Rational::one())).collect()
    }

    fn c(n: usize, v: i64) -> Q {
        Q::constant(n, Rational::from(v))
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = &vars(1)[0];
        let s = &(x + &c(1, 1)) + &x.neg();
        assert_eq!(s, c(1, 1));
    }

    #[test]
    fn difference_of_squares() {
        let v = vars(2);
        let (x, y) = (&v[0], &v[1]);
        let lhs = &(x + y) * &(x - y);
        let rhs = &(x * x) - &(y * y);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn two_square_identity_expansion() {
        // x1, x2, y1, y2
        let v = vars(4);
        let (x1, x2, y1, y2) = (&v[0], &v[1], &v[2], &v[3]);
        let z1 = &(x1 * y1) - &(x2 * y2);
        let z2 = &(x1 * y2) + &(x2 * y1);
        let lhs = &(&z1 * &z1) + &(&z2 * &z2);
        let rhs = &(&(&(x1 * x1) * &(y1 * y1)) + &(&(x1 * x1) * &(y2 * y2)))
            + &(&(&(x2 * x2) * &(y1 * y1)) + &(&(x2 * x2) * &(y2 * y2)));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.len(), 4);
    }

    #[test]
    fn ring_mismatch() {
        assert!(vars(1)[0].checked_add(&vars(2)[0]).is_err());
        assert!(vars(1)[0].checked_mul(&vars(2)[0]).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let x = &vars(1)[0];
        let f = &(x * x) - &c(1, 1);
        assert_eq!(f.evaluate(&[Rational::one()]).unwrap(), Rational::zero());

        let f5 = PrimeField::new(5).unwrap();
        let g = f.map_coeffs(|q| f5.elem(q.numer().try_into().unwrap()));
        assert_eq!(g.evaluate(&[f5.elem(2)]).unwrap(), f5.elem(3));

        let v = vars(2);
        let xy = &v[0] * &v[1];
        assert_eq!(
            xy.evaluate(&[Rational::zero(), Rational::from(7)]).unwrap(),
            Rational::zero()
        );
        assert!(matches!(
            xy.evaluate(&[Rational::zero()]),
            Err(PolyError::PointLength { .. })
        ));
    }

    #[test]
    fn checked_evaluation_detects_field_mismatch() {
        let f5 = Field::prime(5).unwrap();
        let f7 = Field::prime(7).unwrap();
        let x = Polynomial::var(1, 0, f5.one());
        assert!(x.evaluate_checked(&[f5.from_i64(3)]).is_ok());
        assert!(matches!(
            x.evaluate_checked(&[f7.from_i64(3)]),
            Err(PolyError::Field(_))
        ));
    }

    #[test]
    fn display() {
        let v = vars(2);
        let f = &(&(&v[0] * &v[0]) - &(&v[1] * &c(2, 3))) + &c(2, -1);
        assert_eq!(f.to_string(), "x0^2 - 3*x1 - 1");
        assert_eq!(Q::zero(2).to_string(), "0");
    }
}
