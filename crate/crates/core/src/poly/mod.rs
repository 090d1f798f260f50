//! Sparse multivariate polynomials in degree-reverse-lexicographic order.

mod monomial;
mod polynomial;

use thiserror::Error;

pub use monomial::Monomial;
pub use polynomial::{Polynomial, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: {0} vs {1} variables")]
    RingMismatch(usize, usize),
    #[error("monomial is not divisible")]
    NotDivisible,
    #[error("point has {got} coordinates, ring has {expected} variables")]
    PointLength { expected: usize, got: usize },
    #[error("zero polynomial in zero variables has no coefficient field")]
    UnknownField,
    #[error(transparent)]
    Field(#[from] crate::fields::FieldError),
}

/// Flat indexing of the variables `x_{ijk}`, `1 <= i <= n`, `1 <= j <= r`, `1 <= k <= s`.
///
/// `flat(i, j, k) = ((i-1)*r + (j-1))*s + (k-1)`; lower flat index is the larger variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarIndexer {
    pub r: usize,
    pub s: usize,
    pub n: usize,
}

impl VarIndexer {
    pub fn new(r: usize, s: usize, n: usize) -> Self {
        VarIndexer { r, s, n }
    }

    pub fn nvars(&self) -> usize {
        self.r * self.s * self.n
    }

    /// One-based `(i, j, k)` to flat index.
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i));
        debug_assert!((1..=self.r).contains(&j));
        debug_assert!((1..=self.s).contains(&k));
        ((i - 1) * self.r + (j - 1)) * self.s + (k - 1)
    }

    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.s;
        let j = (idx / self.s) % self.r;
        let i = idx / (self.s * self.r);
        (i + 1, j + 1, k + 1)
    }

    pub fn name(&self, idx: usize) -> String {
        let (i, j, k) = self.unflat(idx);
        format!("x{i}_{j}_{k}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexer_is_a_bijection() {
        for (r, s, n) in [(1, 1, 1), (2, 3, 2), (3, 1, 4), (2, 2, 2)] {
            let ix = VarIndexer::new(r, s, n);
            let mut seen = vec![false; ix.nvars()];
            for i in 1..=n {
                for j in 1..=r {
                    for k in 1..=s {
                        let f = ix.flat(i, j, k);
                        assert!(!seen[f]);
                        seen[f] = true;
                        assert_eq!(ix.unflat(f), (i, j, k));
                    }
                }
            }
            assert!(seen.into_iter().all(|b| b));
        }
    }
}
