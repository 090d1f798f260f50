//! Division algorithm, S-pair reduction and Buchberger's algorithm.
//!
//! Runs over `Q` record the largest coefficient height `max(|a|, |b|)` seen in
//! the basis after every step, so observed coefficient growth can be checked
//! against the closed-form bounds in [`crate::bounds`].

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::fields::Coefficient;
use crate::poly::{Monomial, PolyError, Polynomial, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("divisor {0} is the zero polynomial")]
    ZeroDivisor(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("resource cap exceeded after {pairs} S-pairs with {basis} basis elements")]
    ResourceCap { pairs: usize, basis: usize },
    #[error("coefficient heights are only defined for runs over Q")]
    NotRational,
}

/// One quotient step `m_u * g_{s_u}` of a standard expression.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientTerm<C: Coefficient> {
    pub term: Term<C>,
    pub index: usize,
}

/// `f = sum m_u g_{s_u} + remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardExpression<C: Coefficient> {
    pub quotients: Vec<QuotientTerm<C>>,
    pub remainder: Polynomial<C>,
}

impl<C: Coefficient> StandardExpression<C> {
    /// Recomputes `sum m_u g_{s_u} + remainder`.
    pub fn reconstruct(&self, divisors: &[Polynomial<C>]) -> Polynomial<C> {
        let mut acc = self.remainder.clone();
        for q in &self.quotients {
            acc = &acc + &divisors[q.index].mul_term(&q.term.coeff, &q.term.mono);
        }
        acc
    }
}

fn check_divisors<C: Coefficient>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
) -> Result<(), GroebnerError> {
    for (i, g) in divisors.iter().enumerate() {
        if g.nvars() != f.nvars() {
            return Err(PolyError::RingMismatch(f.nvars(), g.nvars()).into());
        }
        if g.is_zero() {
            return Err(GroebnerError::ZeroDivisor(i));
        }
    }
    Ok(())
}

/// Core loop: repeatedly cancel the largest term of the running remainder
/// that some `in(g_i)` divides, using the smallest such `i`.
fn reduce<C: Coefficient>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    mut quotients: Option<&mut Vec<QuotientTerm<C>>>,
) -> Polynomial<C> {
    let nvars = f.nvars();
    let leads: Vec<(&Monomial, C)> = divisors
        .iter()
        .map(|g| {
            let t = g.leading_term().expect("nonzero divisor");
            (&t.mono, t.coeff.inverse().expect("nonzero leading coefficient"))
        })
        .collect();

    // Terms above the current position are indivisible and never change again:
    // each subtraction only introduces terms below the cancelled one.
    let mut settled: Vec<(C, Monomial)> = Vec::new();
    let mut current = f.clone();
    loop {
        let hit = current.terms().iter().enumerate().find_map(|(pos, t)| {
            leads
                .iter()
                .position(|(lm, _)| lm.divides(&t.mono))
                .map(|i| (pos, i))
        });
        let Some((pos, i)) = hit else {
            settled.extend(current.into_terms().into_iter().map(|t| (t.coeff, t.mono)));
            break;
        };
        let mut rest = current.into_terms();
        let tail = rest.split_off(pos);
        settled.extend(rest.into_iter().map(|t| (t.coeff, t.mono)));
        let head = Polynomial::from_terms(nvars, tail.into_iter().map(|t| (t.coeff, t.mono)));
        let lead = head.leading_term().unwrap();
        let (lm, lc_inv) = &leads[i];
        let coeff = lead.coeff.times(lc_inv);
        let mono = lead.mono.div(lm).unwrap();
        current = head.sub_scaled(&coeff, &mono, &divisors[i]);
        if let Some(q) = quotients.as_deref_mut() {
            q.push(QuotientTerm {
                term: Term::new(coeff, mono),
                index: i,
            });
        }
    }
    Polynomial::from_terms(nvars, settled)
}

/// Division algorithm producing a standard expression of `f` with respect to `divisors`.
pub fn divide<C: Coefficient>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
) -> Result<StandardExpression<C>, GroebnerError> {
    check_divisors(f, divisors)?;
    let mut quotients = Vec::new();
    let remainder = reduce(f, divisors, Some(&mut quotients));
    Ok(StandardExpression {
        quotients,
        remainder,
    })
}

/// Remainder of `f` on division by `divisors`.
pub fn remainder<C: Coefficient>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
) -> Result<Polynomial<C>, GroebnerError> {
    check_divisors(f, divisors)?;
    Ok(reduce(f, divisors, None))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SPairRecord<C: Coefficient> {
    pub i: usize,
    pub j: usize,
    /// `in(g_i) / gcd(in(g_i), in(g_j))`, carrying the coefficient of `in(g_i)`.
    pub m_ij: Term<C>,
    pub m_ji: Term<C>,
    pub s_poly: Polynomial<C>,
    pub remainder: Polynomial<C>,
}

/// `(m_ij, m_ji, m_ji*g_i - m_ij*g_j)` with a monic gcd.
pub fn s_polynomial<C: Coefficient>(
    gi: &Polynomial<C>,
    gj: &Polynomial<C>,
) -> (Term<C>, Term<C>, Polynomial<C>) {
    let ti = gi.leading_term().expect("nonzero");
    let tj = gj.leading_term().expect("nonzero");
    let gcd = ti.mono.gcd(&tj.mono);
    let m_ij = Term::new(ti.coeff.clone(), ti.mono.div(&gcd).unwrap());
    let m_ji = Term::new(tj.coeff.clone(), tj.mono.div(&gcd).unwrap());
    let s = &gi.mul_term(&m_ji.coeff, &m_ji.mono) - &gj.mul_term(&m_ij.coeff, &m_ij.mono);
    (m_ij, m_ji, s)
}

/// S-polynomial of `basis[i]`, `basis[j]` and its remainder on division by `basis`.
pub fn s_pair_reduce<C: Coefficient>(
    i: usize,
    j: usize,
    basis: &[Polynomial<C>],
) -> Result<SPairRecord<C>, GroebnerError> {
    let f = basis.get(i).ok_or(GroebnerError::ZeroDivisor(i))?;
    check_divisors(f, basis)?;
    let (m_ij, m_ji, s_poly) = s_polynomial(&basis[i], &basis[j]);
    let remainder = reduce(&s_poly, basis, None);
    Ok(SPairRecord {
        i,
        j,
        m_ij,
        m_ji,
        s_poly,
        remainder,
    })
}

#[derive(Clone, Debug)]
pub struct BuchbergerConfig {
    /// Skip pairs whose initial monomials are coprime.
    pub product_criterion: bool,
    /// Make appended remainders monic. Leave off over `Q` to observe raw growth.
    pub normalize_monic: bool,
    /// Inter-reduce the final basis.
    pub interreduce: bool,
    /// Stop as soon as a nonzero constant enters the basis; every remaining
    /// S-pair then reduces to zero, so the result is still a Gröbner basis.
    pub stop_on_unit: bool,
    pub max_pairs: Option<usize>,
    pub max_basis: Option<usize>,
}

impl Default for BuchbergerConfig {
    fn default() -> Self {
        BuchbergerConfig {
            product_criterion: false,
            normalize_monic: false,
            interreduce: false,
            stop_on_unit: true,
            max_pairs: None,
            max_basis: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    /// Index of this S-pair in processing order.
    pub step: usize,
    pub pair: (usize, usize),
    pub lcm_degree: u32,
    /// `None` when the remainder was zero.
    pub remainder_degree: Option<u32>,
    pub extended: bool,
    pub basis_len: usize,
    /// Basis extensions so far (`m` in the growth bound).
    pub extension_steps: usize,
    /// Largest coefficient height over the whole current basis (runs over `Q`).
    #[serde(serialize_with = "ser_opt_big")]
    pub max_p: Option<BigUint>,
}

fn ser_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GroebnerTrace {
    #[serde(serialize_with = "ser_opt_big")]
    pub initial_max_p: Option<BigUint>,
    pub records: Vec<StepRecord>,
    pub extension_steps: usize,
    pub pairs_processed: usize,
    pub pairs_skipped: usize,
    pub stopped_on_unit: bool,
}

impl GroebnerTrace {
    /// Largest coefficient height after `m` extensions, for `m = 0..=extension_steps`.
    pub fn max_p_by_extension(&self) -> Result<Vec<BigUint>, GroebnerError> {
        let mut out = vec![self.initial_max_p.clone().ok_or(GroebnerError::NotRational)?];
        for r in &self.records {
            if r.extended {
                out.push(r.max_p.clone().ok_or(GroebnerError::NotRational)?);
            }
        }
        Ok(out)
    }
}

/// Largest coefficient height over all basis candidates at any step.
pub fn trace_max_p(trace: &GroebnerTrace) -> Result<BigUint, GroebnerError> {
    Ok(trace
        .max_p_by_extension()?
        .into_iter()
        .max()
        .expect("initial entry"))
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis<C: Coefficient> {
    pub basis: Vec<Polynomial<C>>,
    pub trace: GroebnerTrace,
}

impl<C: Coefficient> GroebnerBasis<C> {
    pub fn contains_unit(&self) -> bool {
        self.basis.iter().any(Polynomial::is_constant)
    }
}

fn poly_max_p<C: Coefficient>(f: &Polynomial<C>) -> Option<BigUint> {
    let mut best = BigUint::from(1u32);
    for t in f.terms() {
        let p = t.coeff.p_measure()?.0;
        if p > best {
            best = p;
        }
    }
    Some(best)
}

fn merge_max(a: Option<BigUint>, b: Option<BigUint>) -> Option<BigUint> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    }
}

/// Buchberger's algorithm with the normal selection strategy: pairs are taken
/// in increasing `(deg lcm(in g_i, in g_j), i, j)` order and every nonzero
/// fully reduced remainder is appended.
pub fn buchberger<C: Coefficient>(
    generators: &[Polynomial<C>],
    config: &BuchbergerConfig,
) -> Result<GroebnerBasis<C>, GroebnerError> {
    let mut basis: Vec<Polynomial<C>> = generators
        .iter()
        .filter(|g| !g.is_zero())
        .cloned()
        .collect();
    if let Some(first) = basis.first() {
        let nvars = first.nvars();
        if let Some(bad) = basis.iter().find(|g| g.nvars() != nvars) {
            return Err(PolyError::RingMismatch(nvars, bad.nvars()).into());
        }
    }

    let mut trace = GroebnerTrace {
        initial_max_p: basis
            .iter()
            .map(poly_max_p)
            .fold(Some(BigUint::from(1u32)), merge_max),
        ..Default::default()
    };
    let mut running_max = trace.initial_max_p.clone();

    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let push_pairs = |pairs: &mut BTreeSet<(u32, usize, usize)>, basis: &[Polynomial<C>], j: usize| {
        let lj = basis[j].leading_monomial().unwrap();
        for i in 0..j {
            let li = basis[i].leading_monomial().unwrap();
            pairs.insert((li.lcm(lj).degree(), i, j));
        }
    };
    for j in 0..basis.len() {
        push_pairs(&mut pairs, &basis, j);
    }

    if basis.iter().any(Polynomial::is_constant) && config.stop_on_unit {
        trace.stopped_on_unit = true;
        pairs.clear();
    }

    while let Some((lcm_degree, i, j)) = pairs.pop_first() {
        if config.product_criterion {
            let li = basis[i].leading_monomial().unwrap();
            let lj = basis[j].leading_monomial().unwrap();
            if li.is_coprime(lj) {
                trace.pairs_skipped += 1;
                continue;
            }
        }
        if let Some(cap) = config.max_pairs {
            if trace.pairs_processed >= cap {
                return Err(GroebnerError::ResourceCap {
                    pairs: trace.pairs_processed,
                    basis: basis.len(),
                });
            }
        }
        let (_, _, s) = s_polynomial(&basis[i], &basis[j]);
        let mut h = reduce(&s, &basis, None);
        let step = trace.pairs_processed;
        trace.pairs_processed += 1;

        let extended = !h.is_zero();
        let remainder_degree = h.total_degree();
        if extended {
            if config.normalize_monic {
                h = h.monic();
            }
            running_max = merge_max(running_max, poly_max_p(&h));
            let unit = h.is_constant();
            basis.push(h);
            trace.extension_steps += 1;
            if let Some(cap) = config.max_basis {
                if basis.len() > cap {
                    return Err(GroebnerError::ResourceCap {
                        pairs: trace.pairs_processed,
                        basis: basis.len(),
                    });
                }
            }
            if unit && config.stop_on_unit {
                trace.stopped_on_unit = true;
                pairs.clear();
            } else {
                push_pairs(&mut pairs, &basis, basis.len() - 1);
            }
        }
        trace.records.push(StepRecord {
            step,
            pair: (i, j),
            lcm_degree,
            remainder_degree,
            extended,
            basis_len: basis.len(),
            extension_steps: trace.extension_steps,
            max_p: running_max.clone(),
        });
    }

    if config.interreduce {
        basis = interreduce(basis)?;
    }
    Ok(GroebnerBasis { basis, trace })
}

/// Reduced Gröbner basis from any Gröbner basis: drop elements whose initial
/// monomial is divisible by another's, reduce the rest fully and make them monic.
pub fn interreduce<C: Coefficient>(
    basis: Vec<Polynomial<C>>,
) -> Result<Vec<Polynomial<C>>, GroebnerError> {
    let mut minimal: Vec<Polynomial<C>> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let lm = g.leading_monomial().unwrap();
        let redundant = basis.iter().enumerate().any(|(o, h)| {
            let lh = h.leading_monomial().unwrap();
            o != idx && lh.divides(lm) && (lh != lm || o < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others: Vec<Polynomial<C>> = minimal
            .iter()
            .enumerate()
            .filter(|(o, _)| *o != idx)
            .map(|(_, h)| h.clone())
            .collect();
        let g = &minimal[idx];
        let lead = Polynomial::from_terms(
            g.nvars(),
            std::iter::once((g.terms()[0].coeff.clone(), g.terms()[0].mono.clone())),
        );
        let tail = Polynomial::from_terms(
            g.nvars(),
            g.terms()[1..].iter().map(|t| (t.coeff.clone(), t.mono.clone())),
        );
        let tail = if others.is_empty() {
            tail
        } else {
            remainder(&tail, &others)?
        };
        out.push((&lead + &tail).monic());
    }
    out.sort_by(|a, b| b.leading_monomial().cmp(&a.leading_monomial()));
    Ok(out)
}

/// `false` exactly when the generated ideal is the whole ring.
pub fn is_proper<C: Coefficient>(
    generators: &[Polynomial<C>],
    config: &BuchbergerConfig,
) -> Result<bool, GroebnerError> {
    Ok(!buchberger(generators, config)?.contains_unit())
}

/// Buchberger's criterion: every S-pair of `basis` reduces to zero.
pub fn satisfies_criterion<C: Coefficient>(basis: &[Polynomial<C>]) -> Result<bool, GroebnerError> {
    for j in 0..basis.len() {
        for i in 0..j {
            if !s_pair_reduce(i, j, basis)?.remainder.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
