//! Point counts over `F_{p^k}` and reconstruction of the zeta function
//! `Z(T) = exp(sum_k N_k T^k / k) = R1(T) / R2(T)` from finitely many counts.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::fields::{Coefficient, Field, FieldElement, FieldError, Rational};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("enumerating {points} points exceeds the budget of {budget}")]
    BudgetExceeded { points: String, budget: u64 },
    #[error("system must have coefficients in a prime field")]
    NotPrimeField,
    #[error("system mixes rings or fields")]
    MixedSystem,
    #[error("series coefficient z_{0} is not an integer; the counts are inconsistent")]
    NonIntegral(usize),
    #[error("series has {have} terms after the constant, at least {need} needed")]
    NotEnoughTerms { have: usize, need: usize },
    #[error("no rational function with deg R1 <= {d1}, deg R2 <= {d2} matches the series")]
    NoSolution { d1: usize, d2: usize },
    #[error("zeta polynomials must have constant term 1")]
    BadConstantTerm,
    #[error("predicted count N_{0} is negative")]
    NegativeCount(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `N_1..N_K` with `N_k = #X(F_{p^k})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCounts {
    pub p: u64,
    pub counts: Vec<BigUint>,
}

impl PointCounts {
    /// `N_k <= N_{km}` (subfield containment) and `N_k <= p^(k * nvars)`.
    pub fn is_consistent(&self, nvars: usize) -> bool {
        let k_max = self.counts.len();
        for k in 1..=k_max {
            let cap = BigUint::from(self.p).pow((k * nvars) as u32);
            if self.counts[k - 1] > cap {
                return false;
            }
            for km in (2 * k..=k_max).step_by(k) {
                if self.counts[k - 1] > self.counts[km - 1] {
                    return false;
                }
            }
        }
        true
    }
}

/// Truncated power series `z_0..z_K` of the zeta function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaSeries {
    pub coeffs: Vec<BigInt>,
}

/// `R1 / R2` with integer coefficients, lowest degree first, constant terms 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFunction {
    pub r1: Vec<BigInt>,
    pub r2: Vec<BigInt>,
}

impl ZetaFunction {
    pub fn new(r1: Vec<BigInt>, r2: Vec<BigInt>) -> Result<Self, ZetaError> {
        let r1 = trim(r1);
        let r2 = trim(r2);
        if r1.first() != Some(&BigInt::one()) || r2.first() != Some(&BigInt::one()) {
            return Err(ZetaError::BadConstantTerm);
        }
        Ok(ZetaFunction { r1, r2 })
    }

    pub fn deg_r1(&self) -> usize {
        self.r1.len() - 1
    }

    pub fn deg_r2(&self) -> usize {
        self.r2.len() - 1
    }

    /// `R1 / R2` expanded to `T^len-1`.
    pub fn expand(&self, len: usize) -> Vec<BigInt> {
        series_div(&self.r1, &self.r2, len)
    }
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Power-series quotient `a / b` for `b_0 = 1`, first `len` coefficients.
fn series_div(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    debug_assert!(b[0].is_one());
    let mut out: Vec<BigInt> = Vec::with_capacity(len);
    for n in 0..len {
        let mut c = a.get(n).cloned().unwrap_or_default();
        for l in 1..=n.min(b.len().saturating_sub(1)) {
            c -= &b[l] * &out[n - l];
        }
        out.push(c);
    }
    out
}

/// Maps a system with rational coefficients into `F_p`.
pub fn reduce_system(
    system: &[Polynomial<Rational>],
    p: u64,
) -> Result<Vec<Polynomial<FieldElement>>, ZetaError> {
    let field = Field::prime(p)?;
    system
        .iter()
        .map(|f| f.try_map_coeffs(|c| field.from_rational(c)))
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

/// Number of common zeros of `system` (coefficients in `F_p`) with coordinates in `F_{p^k}`.
///
/// Coordinates are enumerated in the order of [`Field::enumerate`]; the work
/// is split over the value of the first coordinate.
pub fn count_points(
    system: &[Polynomial<FieldElement>],
    k: usize,
    budget: u64,
) -> Result<u64, ZetaError> {
    let Some(first) = system.first() else {
        return Err(ZetaError::MixedSystem);
    };
    let nvars = first.nvars();
    let mut p = None;
    for f in system {
        if f.nvars() != nvars {
            return Err(ZetaError::MixedSystem);
        }
        for t in f.terms() {
            match &t.coeff {
                FieldElement::Prime(x) if p.is_none_or(|p| p == x.modulus()) => p = Some(x.modulus()),
                FieldElement::Prime(_) => return Err(ZetaError::MixedSystem),
                _ => return Err(ZetaError::NotPrimeField),
            }
        }
    }
    // A system of zero polynomials carries no field; count over F_3 would be
    // arbitrary, so require at least one coefficient.
    let p = p.ok_or(ZetaError::NotPrimeField)?;
    let field = Field::finite(p, k)?;
    let lifted: Vec<Polynomial<FieldElement>> = system
        .iter()
        .map(|f| {
            f.map_coeffs(|c| match c {
                FieldElement::Prime(x) => field.from_i64(x.value() as i64),
                _ => unreachable!(),
            })
        })
        .collect();

    let q = BigUint::from(p).pow(k as u32);
    let points = q.pow(nvars as u32);
    if points > BigUint::from(budget) {
        return Err(ZetaError::BudgetExceeded {
            points: points.to_string(),
            budget,
        });
    }
    let elements = field.enumerate().expect("finite field");
    if nvars == 0 {
        let zero = lifted.iter().all(|f| f.is_zero());
        return Ok(zero as u64);
    }
    let q = elements.len();
    let count = (0..q)
        .into_par_iter()
        .map(|x0| {
            let mut digits = vec![0usize; nvars];
            digits[0] = x0;
            let mut point: Vec<FieldElement> = digits.iter().map(|&d| elements[d].clone()).collect();
            let mut zeros = 0u64;
            loop {
                if lifted
                    .iter()
                    .all(|f| f.evaluate(&point).map(|v| v.is_zero()).unwrap_or(false))
                {
                    zeros += 1;
                }
                let mut pos = nvars;
                loop {
                    pos -= 1;
                    if pos == 0 {
                        return zeros;
                    }
                    digits[pos] += 1;
                    if digits[pos] < q {
                        point[pos] = elements[digits[pos]].clone();
                        break;
                    }
                    digits[pos] = 0;
                    point[pos] = elements[0].clone();
                }
            }
        })
        .sum();
    Ok(count)
}

/// `N_1..N_kmax` for a system over `F_p`.
pub fn count_all(
    system: &[Polynomial<FieldElement>],
    p: u64,
    kmax: usize,
    budget: u64,
) -> Result<PointCounts, ZetaError> {
    let counts = (1..=kmax)
        .map(|k| count_points(system, k, budget).map(BigUint::from))
        .collect::<Result<_, _>>()?;
    Ok(PointCounts { p, counts })
}

/// `z_0..z_K` of `exp(sum N_k T^k / k)` via `n z_n = sum_{k=1}^n N_k z_{n-k}`.
pub fn series_from_counts(counts: &[BigUint], k_trunc: usize) -> Result<ZetaSeries, ZetaError> {
    if counts.len() < k_trunc {
        return Err(ZetaError::NotEnoughTerms {
            have: counts.len(),
            need: k_trunc,
        });
    }
    let counts: Vec<BigInt> = counts.iter().map(|c| BigInt::from(c.clone())).collect();
    let mut z: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=k_trunc {
        let mut acc = BigInt::zero();
        for k in 1..=n {
            acc += &counts[k - 1] * &z[n - k];
        }
        let (q, r) = acc.div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(ZetaError::NonIntegral(n));
        }
        z.push(q);
    }
    Ok(ZetaSeries { coeffs: z })
}

/// Solves `A x = b` exactly; free variables are set to zero. `None` when inconsistent.
fn solve(mut rows: Vec<Vec<BigRational>>, unknowns: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..unknowns {
        let Some(pr) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, pr);
        let inv = rows[row][col].recip();
        for v in rows[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..=unknowns {
                    let delta = &factor * &rows[row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][unknowns].clone();
    }
    Some(x)
}

/// `R1`, `R2` of exact degrees at most `e1`, `e2` with `R2 * Z = R1` on every known coefficient.
fn solve_at(z: &[BigInt], e1: usize, e2: usize) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let k = z.len() - 1;
    let zr = |i: usize| BigRational::from_integer(z[i].clone());
    // Unknowns b_1..b_e2; equation j: z_j + sum_l b_l z_{j-l} = 0 for j > e1.
    let rows: Vec<Vec<BigRational>> = (e1 + 1..=k)
        .map(|j| {
            let mut row: Vec<BigRational> = (1..=e2)
                .map(|l| if l <= j { zr(j - l) } else { BigRational::zero() })
                .collect();
            row.push(-zr(j));
            row
        })
        .collect();
    let b_tail = if e2 == 0 {
        if rows.iter().any(|r| !r[0].is_zero()) {
            return None;
        }
        Vec::new()
    } else {
        solve(rows, e2)?
    };
    let mut b = vec![BigRational::one()];
    b.extend(b_tail);
    let a: Vec<BigRational> = (0..=e1)
        .map(|i| {
            (0..=i.min(e2))
                .map(|l| &b[l] * zr(i - l))
                .fold(BigRational::zero(), |acc, x| acc + x)
        })
        .collect();
    Some((a, b))
}

fn to_integers(v: Vec<BigRational>) -> Option<Vec<BigInt>> {
    v.into_iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

/// Recovers `R1 / R2` with `deg R1 <= d1`, `deg R2 <= d2` from the series.
///
/// With `cancel` the pair of least total degree is returned (ties broken by
/// smaller `deg R2`), which has no common factor. Without it the system is
/// solved at exactly `(d1, d2)` with free unknowns set to zero. All known
/// series coefficients are used as equations, so bounds that are too small
/// show up as [`ZetaError::NoSolution`].
pub fn reconstruct_zeta(
    series: &ZetaSeries,
    d1: usize,
    d2: usize,
    cancel: bool,
) -> Result<ZetaFunction, ZetaError> {
    let z = &series.coeffs;
    if z.len() < d1 + d2 + 1 {
        return Err(ZetaError::NotEnoughTerms {
            have: z.len().saturating_sub(1),
            need: d1 + d2,
        });
    }
    let mut candidates: Vec<(usize, usize)> = if cancel {
        (0..=d1).flat_map(|e1| (0..=d2).map(move |e2| (e1, e2))).collect()
    } else {
        vec![(d1, d2)]
    };
    candidates.sort_by_key(|&(e1, e2)| (e1 + e2, e2, e1));
    for (e1, e2) in candidates {
        if let Some((a, b)) = solve_at(z, e1, e2) {
            let (Some(r1), Some(r2)) = (to_integers(a), to_integers(b)) else {
                return Err(ZetaError::NonIntegral(e1 + e2));
            };
            let zf = ZetaFunction::new(r1, r2)?;
            debug_assert_eq!(&zf.expand(z.len()), z);
            return Ok(zf);
        }
    }
    Err(ZetaError::NoSolution { d1, d2 })
}

/// `N_1..N_K` from `sum N_k T^k = T R1'/R1 - T R2'/R2`.
pub fn predict_counts(zf: &ZetaFunction, horizon: usize) -> Result<Vec<BigInt>, ZetaError> {
    if zf.r1.first() != Some(&BigInt::one()) || zf.r2.first() != Some(&BigInt::one()) {
        return Err(ZetaError::BadConstantTerm);
    }
    let log_deriv = |r: &[BigInt]| {
        let t_deriv: Vec<BigInt> = r.iter().enumerate().map(|(i, c)| c * BigInt::from(i)).collect();
        series_div(&t_deriv, r, horizon + 1)
    };
    let a = log_deriv(&zf.r1);
    let b = log_deriv(&zf.r2);
    (1..=horizon)
        .map(|k| {
            let n = &a[k] - &b[k];
            if n.is_negative() {
                Err(ZetaError::NegativeCount(k))
            } else {
                Ok(n)
            }
        })
        .collect()
}

/// `(4d + 9)^(n + m)`.
pub fn bombieri_bound(d: u64, n: u64, m: u64) -> BigUint {
    BigUint::from(4 * d + 9).pow((n + m).to_u32().expect("exponent fits in u32"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;
    use crate::sos::{gen_sos_ideal, SosType};

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn counts(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn x2_minus_1(p: u64) -> Vec<Polynomial<FieldElement>> {
        let f = PrimeField::new(p).unwrap();
        let x = Polynomial::var(1, 0, FieldElement::Prime(f.one()));
        vec![&(&x * &x) - &Polynomial::constant(1, FieldElement::Prime(f.one()))]
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_points(&x2_minus_1(3), 1, 1 << 20).unwrap(), 2);
        assert_eq!(count_points(&x2_minus_1(3), 2, 1 << 20).unwrap(), 2);
        let ideal = gen_sos_ideal(SosType::new(1, 2, 1).unwrap());
        let sys = reduce_system(&ideal.generators, 5).unwrap();
        assert_eq!(count_points(&sys, 1, 1 << 20).unwrap(), 0);
        assert!(matches!(
            count_points(&sys, 3, 100),
            Err(ZetaError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn series_examples() {
        let s = series_from_counts(&counts(&[2, 2, 2, 2]), 4).unwrap();
        assert_eq!(s.coeffs, big(&[1, 2, 3, 4, 5]));
        let s = series_from_counts(&counts(&[0, 0, 0]), 3).unwrap();
        assert_eq!(s.coeffs, big(&[1, 0, 0, 0]));
        let s = series_from_counts(&counts(&[3, 9, 27]), 3).unwrap();
        assert_eq!(s.coeffs, big(&[1, 3, 9, 27]));
        assert_eq!(
            series_from_counts(&counts(&[1, 2]), 2),
            Err(ZetaError::NonIntegral(2))
        );
    }

    #[test]
    fn reconstruction_examples() {
        let s = ZetaSeries {
            coeffs: big(&[1, 2, 3, 4, 5]),
        };
        let zf = reconstruct_zeta(&s, 0, 2, true).unwrap();
        assert_eq!((zf.r1, zf.r2), (big(&[1]), big(&[1, -2, 1])));

        let s = ZetaSeries { coeffs: big(&[1, 0, 0]) };
        let zf = reconstruct_zeta(&s, 1, 1, true).unwrap();
        assert_eq!((zf.r1, zf.r2), (big(&[1]), big(&[1])));

        let s = ZetaSeries {
            coeffs: big(&[1, 3, 9]),
        };
        let zf = reconstruct_zeta(&s, 1, 1, true).unwrap();
        assert_eq!((zf.r1, zf.r2), (big(&[1]), big(&[1, -3])));
    }

    #[test]
    fn reconstruction_failures() {
        let s = ZetaSeries {
            coeffs: big(&[1, 2, 3, 4, 5]),
        };
        assert_eq!(
            reconstruct_zeta(&s, 0, 1, true),
            Err(ZetaError::NoSolution { d1: 0, d2: 1 })
        );
        assert!(matches!(
            reconstruct_zeta(&s, 3, 3, true),
            Err(ZetaError::NotEnoughTerms { .. })
        ));
    }

    #[test]
    fn uncancelled_pair_still_matches() {
        let s = ZetaSeries {
            coeffs: big(&[1, 3, 9, 27, 81]),
        };
        let zf = reconstruct_zeta(&s, 1, 2, false).unwrap();
        assert_eq!(zf.expand(5), s.coeffs);
    }

    #[test]
    fn prediction_examples() {
        let zf = ZetaFunction::new(big(&[1]), big(&[1, -2, 1])).unwrap();
        assert_eq!(predict_counts(&zf, 6).unwrap(), big(&[2; 6]));
        let zf = ZetaFunction::new(big(&[1]), big(&[1])).unwrap();
        assert_eq!(predict_counts(&zf, 4).unwrap(), big(&[0; 4]));
        let zf = ZetaFunction::new(big(&[1]), big(&[1, -3])).unwrap();
        assert_eq!(predict_counts(&zf, 3).unwrap(), big(&[3, 9, 27]));
        let zf = ZetaFunction::new(big(&[1, -3]), big(&[1])).unwrap();
        assert_eq!(predict_counts(&zf, 1), Err(ZetaError::NegativeCount(1)));
        assert_eq!(ZetaFunction::new(big(&[2]), big(&[1])), Err(ZetaError::BadConstantTerm));
    }

    #[test]
    fn bombieri_examples() {
        assert_eq!(bombieri_bound(2, 1, 1), BigUint::from(289u32));
        assert_eq!(bombieri_bound(1, 1, 1), BigUint::from(169u32));
        assert_eq!(bombieri_bound(2, 8, 9), BigUint::from(17u32).pow(17));
    }

    #[test]
    fn consistency_of_counts() {
        let ok = PointCounts { p: 5, counts: counts(&[2, 2, 2, 2]) };
        assert!(ok.is_consistent(1));
        let bad = PointCounts { p: 5, counts: counts(&[3, 2]) };
        assert!(!bad.is_consistent(1));
        let too_many = PointCounts { p: 3, counts: counts(&[4]) };
        assert!(!too_many.is_consistent(1));
    }
}
