use std::fmt;

use super::{Coefficient, FieldError};

/// The prime field `F_p` for an odd prime `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

/// Residue modulo `p`; carries its modulus so mixed-field arithmetic is detectable.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        if p >= 1 << 32 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: i64) -> Fp {
        Fp {
            value: v.rem_euclid(self.p as i64) as u64,
            modulus: self.p,
        }
    }

    pub fn zero(&self) -> Fp {
        self.elem(0)
    }

    pub fn one(&self) -> Fp {
        self.elem(1)
    }

    /// All residues `0, 1, ..., p-1` in order.
    pub fn enumerate(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| Fp {
            value: v,
            modulus: self.p,
        })
    }
}

impl Fp {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    pub fn pow(&self, exp: u64) -> Fp {
        Fp {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    fn same(&self, rhs: &Fp) {
        assert_eq!(
            self.modulus, rhs.modulus,
            "arithmetic between F_{} and F_{}",
            self.modulus, rhs.modulus
        );
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Coefficient for Fp {
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn is_one(&self) -> bool {
        self.value == 1
    }
    fn zero_like(&self) -> Self {
        Fp {
            value: 0,
            modulus: self.modulus,
        }
    }
    fn one_like(&self) -> Self {
        Fp {
            value: 1,
            modulus: self.modulus,
        }
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.same(rhs);
        let s = self.value + rhs.value;
        Fp {
            value: if s >= self.modulus { s - self.modulus } else { s },
            modulus: self.modulus,
        }
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.same(rhs);
        Fp {
            value: if self.value >= rhs.value {
                self.value - rhs.value
            } else {
                self.value + self.modulus - rhs.value
            },
            modulus: self.modulus,
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        self.same(rhs);
        Fp {
            value: self.value * rhs.value % self.modulus,
            modulus: self.modulus,
        }
    }
    fn negate(&self) -> Self {
        Fp {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
    fn inverse(&self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|value| Fp {
            value,
            modulus: self.modulus,
        })
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.field().elem(n)
    }
}
