use std::fmt;
use std::sync::Arc;

use super::prime::{inv_mod, is_prime};
use super::{Coefficient, FieldError};

/// `F_{p^k} = F_p[t] / (modulus)`.
///
/// The modulus is the smallest monic irreducible polynomial of degree `k`
/// when monic candidates are ranked by the base-`p` value `sum c_i p^i` of
/// their lower coefficients (constant term least significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionField {
    p: u64,
    k: usize,
    /// Coefficients `c_0 .. c_k`, constant term first, `c_k = 1`.
    modulus: Vec<u64>,
}

/// Element of an [`ExtensionField`]: a residue polynomial of degree `< k`.
#[derive(Clone)]
pub struct Fq {
    field: Arc<ExtensionField>,
    coeffs: Vec<u64>,
}

// Dense polynomials over F_p, constant term first, no trailing zeros.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Quotient and remainder of `a / b`, `b` nonzero.
fn poly_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p).expect("nonzero leading coefficient");
    let mut quot = vec![0u64; rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * lead_inv % p;
        quot[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + p - c * bi % p) % p;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    poly_divrem(a, b, p).1
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u64], mut exp: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = poly_rem(base, modulus, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &base, p), modulus, p);
        }
        base = poly_rem(&poly_mul(&base, &base, p), modulus, p);
        exp >>= 1;
    }
    acc
}

/// Irreducibility by trial division against every monic polynomial of degree `<= k/2`.
pub(crate) fn irreducible_by_trial_division(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let k = f.len().saturating_sub(1);
    if k == 0 {
        return false;
    }
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = digits(idx, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Irreducibility by the distinct-degree criterion: `gcd(f, t^(p^i) - t) = 1` for `i <= k/2`.
pub(crate) fn irreducible_by_distinct_degree(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let k = f.len().saturating_sub(1);
    if k == 0 {
        return false;
    }
    let t = vec![0, 1];
    let mut frob = poly_rem(&t, &f, p);
    for _ in 1..=k / 2 {
        frob = poly_powmod(&frob, p, &f, p);
        let g = poly_gcd(&f, &poly_sub(&frob, &t, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

const TRIAL_DIVISION_LIMIT: u64 = 100_000;

fn is_irreducible(f: &[u64], p: u64, k: usize) -> bool {
    let trial_cost = p.checked_pow((k / 2) as u32).unwrap_or(u64::MAX);
    if k <= 8 && trial_cost <= TRIAL_DIVISION_LIMIT {
        irreducible_by_trial_division(f, p)
    } else {
        irreducible_by_distinct_degree(f, p)
    }
}

fn digits(mut idx: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(idx % p);
        idx /= p;
    }
    out
}

impl ExtensionField {
    /// Deterministic `F_{p^k}` for an odd prime `p < 2^32` and `k >= 1`.
    pub fn new(p: u64, k: usize) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        if p >= 1 << 32 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        // An irreducible of every degree exists, so this loop terminates.
        let mut idx: u64 = 0;
        loop {
            let mut cand = digits(idx, p, k);
            cand.push(1);
            if is_irreducible(&cand, p, k) {
                return Ok(ExtensionField {
                    p,
                    k,
                    modulus: cand,
                });
            }
            idx += 1;
        }
    }

    /// Field with a caller-supplied monic modulus, checked for irreducibility.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        if p >= 1 << 32 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let modulus = trim(modulus.into_iter().map(|c| c % p).collect());
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(FieldError::ReducibleModulus);
        }
        let k = modulus.len() - 1;
        if !irreducible_by_distinct_degree(&modulus, p) {
            return Err(FieldError::ReducibleModulus);
        }
        Ok(ExtensionField { p, k, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `p^k`, if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        self.p.checked_pow(self.k as u32)
    }

    pub fn elem(self: &Arc<Self>, coeffs: &[u64]) -> Fq {
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % self.p).collect();
        let c = if c.len() > self.k {
            let mut r = poly_rem(&c, &self.modulus, self.p);
            r.resize(self.k, 0);
            r
        } else {
            c.resize(self.k, 0);
            c
        };
        Fq {
            field: Arc::clone(self),
            coeffs: c,
        }
    }

    /// Embedding of the prime subfield.
    pub fn constant(self: &Arc<Self>, v: i64) -> Fq {
        self.elem(&[v.rem_euclid(self.p as i64) as u64])
    }

    /// The element whose base-`p` digits (constant term least significant) spell `idx`.
    pub fn from_index(self: &Arc<Self>, idx: u64) -> Fq {
        Fq {
            field: Arc::clone(self),
            coeffs: digits(idx, self.p, self.k),
        }
    }

    /// All `p^k` elements in base-`p` positional order.
    pub fn enumerate(self: &Arc<Self>) -> impl Iterator<Item = Fq> + '_ {
        let q = self.order().expect("field too large to enumerate");
        (0..q).map(move |i| self.from_index(i))
    }
}

impl Fq {
    pub fn field(&self) -> &Arc<ExtensionField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Base-`p` positional index, inverse of [`ExtensionField::from_index`].
    pub fn index(&self) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.field.p + c)
    }

    pub fn same_field(&self, rhs: &Fq) -> bool {
        Arc::ptr_eq(&self.field, &rhs.field) || *self.field == *rhs.field
    }

    fn check(&self, rhs: &Fq) {
        assert!(
            self.same_field(rhs),
            "arithmetic between different extension fields"
        );
    }

    fn with(&self, coeffs: Vec<u64>) -> Fq {
        let mut c = coeffs;
        c.resize(self.field.k, 0);
        Fq {
            field: Arc::clone(&self.field),
            coeffs: c,
        }
    }

    pub fn pow(&self, mut exp: u128) -> Fq {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            exp >>= 1;
        }
        acc
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.same_field(other)
    }
}

impl Eq for Fq {}

impl std::hash::Hash for Fq {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}t"),
                _ => format!("{c}t^{i}"),
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "{} in F_{}^{}", terms.join("+"), self.field.p, self.field.k)
    }
}

impl Coefficient for Fq {
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
    fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }
    fn zero_like(&self) -> Self {
        self.with(Vec::new())
    }
    fn one_like(&self) -> Self {
        self.with(vec![1])
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.check(rhs);
        let p = self.field.p;
        let c = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        self.with(c)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.check(rhs);
        let p = self.field.p;
        let c = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        self.with(c)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.check(rhs);
        let p = self.field.p;
        let prod = poly_mul(&self.coeffs, &rhs.coeffs, p);
        self.with(poly_rem(&prod, &self.field.modulus, p))
    }
    fn negate(&self) -> Self {
        let p = self.field.p;
        self.with(self.coeffs.iter().map(|&a| (p - a) % p).collect())
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // Extended Euclid on (modulus, a), tracking the cofactor of a.
        let p = self.field.p;
        let mut r0 = self.field.modulus.clone();
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1, p);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible.
        let c = inv_mod(r0[0], p)?;
        let inv: Vec<u64> = s0.iter().map(|&x| x * c % p).collect();
        Some(self.with(poly_rem(&inv, &self.field.modulus, p)))
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.field.constant(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force: a monic polynomial of degree 2 or 3 is irreducible iff it has no root.
    fn has_root(f: &[u64], p: u64) -> bool {
        (0..p).any(|x| f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0)
    }

    fn frobenius_is_identity(x: &Fq) -> bool {
        let f = x.field();
        let q = (f.p() as u128).pow(f.degree() as u32);
        x.pow(q) == *x
    }

    #[test]
    fn smallest_irreducible_moduli() {
        assert_eq!(ExtensionField::new(3, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(ExtensionField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(ExtensionField::new(5, 2).unwrap().modulus(), &[2, 0, 1]);
    }

    #[test]
    fn smallest_modulus_matches_root_oracle() {
        for p in [3u64, 5, 7, 11, 13] {
            for k in [2usize, 3] {
                let expected = (0u64..)
                    .map(|idx| {
                        let mut c = digits(idx, p, k);
                        c.push(1);
                        c
                    })
                    .find(|c| !has_root(c, p))
                    .unwrap();
                assert_eq!(ExtensionField::new(p, k).unwrap().modulus(), &expected[..]);
            }
        }
    }

    #[test]
    fn irreducibility_tests_agree() {
        for p in [3u64, 5, 7] {
            for k in 1..=4usize {
                for idx in 0..p.pow(k as u32) {
                    let mut f = digits(idx, p, k);
                    f.push(1);
                    assert_eq!(
                        irreducible_by_trial_division(&f, p),
                        irreducible_by_distinct_degree(&f, p),
                        "p={p} f={f:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn t_squared_in_f9() {
        let f = Arc::new(ExtensionField::new(3, 2).unwrap());
        let t = f.elem(&[0, 1]);
        assert_eq!(t.times(&t), f.constant(2));
    }

    #[test]
    fn enumeration_is_positional() {
        let f = Arc::new(ExtensionField::new(3, 2).unwrap());
        let all: Vec<Fq> = f.enumerate().collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], f.constant(0));
        assert_eq!(all[1], f.constant(1));
        assert_eq!(all[2], f.constant(2));
        assert_eq!(all[3], f.elem(&[0, 1]));
        for (i, x) in all.iter().enumerate() {
            assert_eq!(x.index(), i as u64);
        }
        let f25 = Arc::new(ExtensionField::new(5, 2).unwrap());
        assert_eq!(f25.enumerate().count(), 25);
    }

    #[test]
    fn frobenius_fixes_every_element() {
        for (p, k) in [(3u64, 2usize), (3, 3), (5, 2), (7, 2)] {
            let f = Arc::new(ExtensionField::new(p, k).unwrap());
            for x in f.enumerate() {
                assert!(frobenius_is_identity(&x));
            }
        }
    }

    #[test]
    fn inverses_in_f27() {
        let f = Arc::new(ExtensionField::new(3, 3).unwrap());
        for x in f.enumerate().skip(1) {
            let inv = x.inverse().unwrap();
            assert!(x.times(&inv).is_one(), "{x:?}");
        }
        assert!(f.constant(0).inverse().is_none());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(ExtensionField::new(2, 3), Err(FieldError::CharacteristicTwo));
        assert_eq!(ExtensionField::new(15, 2), Err(FieldError::NotPrime(15)));
        assert_eq!(ExtensionField::new(5, 0), Err(FieldError::ZeroDegree));
        assert_eq!(
            ExtensionField::with_modulus(5, vec![1, 0, 1]),
            Err(FieldError::ReducibleModulus)
        );
        assert!(ExtensionField::with_modulus(5, vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn large_prime_uses_distinct_degree() {
        let f = ExtensionField::new(101, 8).unwrap();
        assert!(irreducible_by_distinct_degree(f.modulus(), 101));
    }
}
