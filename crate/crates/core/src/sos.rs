//! The ideal of sums-of-squares formulas of type `[r,s,n]`, explicit formulas
//! and their verification.
//!
//! A formula `(x_1^2+...+x_r^2)(y_1^2+...+y_s^2) = z_1^2+...+z_n^2` with
//! `z_i = sum_{j,k} a_{ijk} x_j y_k` exists over a field `F` exactly when the
//! tensor `a` is a common zero of the generators built by [`gen_sos_ideal`].

use std::fmt;

use thiserror::Error;

use crate::fields::{Coefficient, Field, FieldElement, FieldError, Fp, Fq, Rational};
use crate::groebner::{buchberger, BuchbergerConfig, GroebnerError};
use crate::poly::{Monomial, PolyError, Polynomial, VarIndexer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SosError {
    #[error("r, s and n must all be at least 1 (got [{0},{1},{2}])")]
    BadType(usize, usize, usize),
    #[error("coefficient tensor has {got} entries, type needs {expected}")]
    Shape { expected: usize, got: usize },
    #[error("catalog has formulas only for n in {{1, 2, 4, 8}}, not {0}")]
    UnsupportedCatalog(usize),
    #[error("formula coefficients are not rational")]
    NotRational,
    #[error("expansion check and generator check disagree")]
    Disagreement,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SosType {
    pub r: usize,
    pub s: usize,
    pub n: usize,
}

impl SosType {
    pub fn new(r: usize, s: usize, n: usize) -> Result<Self, SosError> {
        if r == 0 || s == 0 || n == 0 {
            return Err(SosError::BadType(r, s, n));
        }
        Ok(SosType { r, s, n })
    }

    pub fn nvars(&self) -> usize {
        self.r * self.s * self.n
    }

    pub fn indexer(&self) -> VarIndexer {
        VarIndexer::new(self.r, self.s, self.n)
    }

    /// `(r(r+1)/2) * (s(s+1)/2)`.
    pub fn generator_count(&self) -> usize {
        self.r * (self.r + 1) / 2 * (self.s * (self.s + 1) / 2)
    }
}

impl fmt::Display for SosType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.r, self.s, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorFamily {
    /// `sum_i x_ijk^2 - 1`
    Norm,
    /// `sum_i x_ijk x_ij'k`, `j < j'`
    SameColumn,
    /// `sum_i x_ijk x_ijk'`, `k < k'`
    SameRow,
    /// `sum_i (x_ijk x_ij'k' + x_ijk' x_ij'k)`, `j < j'`, `k < k'`
    Cross,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosIdealSpec {
    pub sos_type: SosType,
    pub generators: Vec<Polynomial<Rational>>,
    pub families: Vec<GeneratorFamily>,
}

impl SosIdealSpec {
    /// Generators with coefficients mapped into `field`.
    pub fn generators_over(&self, field: &Field) -> Vec<Polynomial<FieldElement>> {
        let one = field.one();
        self.generators_like(&one)
    }

    /// Generators over the field of `one`.
    pub fn generators_like<C: Coefficient>(&self, one: &C) -> Vec<Polynomial<C>> {
        self.generators
            .iter()
            .map(|g| {
                g.map_coeffs(|c| {
                    if c.is_one() {
                        one.clone()
                    } else {
                        one.negate()
                    }
                })
            })
            .collect()
    }

    pub fn family_sizes(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for f in &self.families {
            out[*f as usize] += 1;
        }
        out
    }
}

fn sum_of_products(
    ix: &VarIndexer,
    n: usize,
    pairs: &[((usize, usize), (usize, usize))],
    constant: i64,
) -> Polynomial<Rational> {
    let nvars = ix.nvars();
    let mut terms = Vec::new();
    for i in 1..=n {
        for &((j1, k1), (j2, k2)) in pairs {
            let a = Monomial::var(nvars, ix.flat(i, j1, k1));
            let b = Monomial::var(nvars, ix.flat(i, j2, k2));
            terms.push((Rational::one(), a.mul(&b)));
        }
    }
    if constant != 0 {
        terms.push((Rational::from(constant), Monomial::one(nvars)));
    }
    Polynomial::from_terms(nvars, terms)
}

/// Generators of the ideal whose zeros are the coefficient tensors of
/// formulas of type `t`, family by family, indices in lexicographic order.
pub fn gen_sos_ideal(t: SosType) -> SosIdealSpec {
    let ix = t.indexer();
    let (r, s, n) = (t.r, t.s, t.n);
    let mut generators = Vec::with_capacity(t.generator_count());
    let mut families = Vec::with_capacity(t.generator_count());

    for j in 1..=r {
        for k in 1..=s {
            generators.push(sum_of_products(&ix, n, &[((j, k), (j, k))], -1));
            families.push(GeneratorFamily::Norm);
        }
    }
    for j in 1..=r {
        for j2 in j + 1..=r {
            for k in 1..=s {
                generators.push(sum_of_products(&ix, n, &[((j, k), (j2, k))], 0));
                families.push(GeneratorFamily::SameColumn);
            }
        }
    }
    for j in 1..=r {
        for k in 1..=s {
            for k2 in k + 1..=s {
                generators.push(sum_of_products(&ix, n, &[((j, k), (j, k2))], 0));
                families.push(GeneratorFamily::SameRow);
            }
        }
    }
    for j in 1..=r {
        for j2 in j + 1..=r {
            for k in 1..=s {
                for k2 in k + 1..=s {
                    let pairs = [((j, k), (j2, k2)), ((j, k2), (j2, k))];
                    generators.push(sum_of_products(&ix, n, &pairs, 0));
                    families.push(GeneratorFamily::Cross);
                }
            }
        }
    }
    SosIdealSpec {
        sos_type: t,
        generators,
        families,
    }
}

/// A coefficient tensor `a_{ijk}`, stored in the flat variable order of
/// [`VarIndexer`].
#[derive(Clone, Debug, PartialEq)]
pub struct SosFormula {
    sos_type: SosType,
    field: Field,
    alpha: Vec<FieldElement>,
}

impl SosFormula {
    pub fn new(sos_type: SosType, field: Field, alpha: Vec<FieldElement>) -> Result<Self, SosError> {
        if alpha.len() != sos_type.nvars() {
            return Err(SosError::Shape {
                expected: sos_type.nvars(),
                got: alpha.len(),
            });
        }
        for a in &alpha {
            if a.field() != field {
                return Err(FieldError::FieldMismatch(a.field().to_string(), field.to_string()).into());
            }
        }
        Ok(SosFormula {
            sos_type,
            field,
            alpha,
        })
    }

    /// Builds the tensor from a function of one-based `(i, j, k)`.
    pub fn from_fn(
        sos_type: SosType,
        field: Field,
        mut f: impl FnMut(usize, usize, usize) -> FieldElement,
    ) -> Result<Self, SosError> {
        let ix = sos_type.indexer();
        let alpha = (0..ix.nvars())
            .map(|idx| {
                let (i, j, k) = ix.unflat(idx);
                f(i, j, k)
            })
            .collect();
        SosFormula::new(sos_type, field, alpha)
    }

    pub fn sos_type(&self) -> SosType {
        self.sos_type
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn alpha(&self) -> &[FieldElement] {
        &self.alpha
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &FieldElement {
        &self.alpha[self.sos_type.indexer().flat(i, j, k)]
    }

    /// `alpha[i][j][k]`, zero-based.
    pub fn nested(&self) -> Vec<Vec<Vec<FieldElement>>> {
        let t = self.sos_type;
        (1..=t.n)
            .map(|i| {
                (1..=t.r)
                    .map(|j| (1..=t.s).map(|k| self.get(i, j, k).clone()).collect())
                    .collect()
            })
            .collect()
    }

    /// `z_1..z_n` as bilinear forms in `x_1..x_r, y_1..y_s` (variables `0..r`, then `r..r+s`).
    pub fn z_polynomials(&self) -> Vec<Polynomial<FieldElement>> {
        let t = self.sos_type;
        let nv = t.r + t.s;
        (1..=t.n)
            .map(|i| {
                let terms = (1..=t.r).flat_map(|j| {
                    (1..=t.s).map(move |k| {
                        let m = Monomial::var(nv, j - 1).mul(&Monomial::var(nv, t.r + k - 1));
                        (j, k, m)
                    })
                });
                Polynomial::from_terms(
                    nv,
                    terms
                        .map(|(j, k, m)| (self.get(i, j, k).clone(), m))
                        .collect::<Vec<_>>(),
                )
            })
            .collect()
    }

    pub fn display_z(&self) -> Vec<String> {
        let r = self.sos_type.r;
        let names = move |v: usize| {
            if v < r {
                format!("x{}", v + 1)
            } else {
                format!("y{}", v - r + 1)
            }
        };
        self.z_polynomials()
            .iter()
            .map(|z| z.fmt_with(&names))
            .collect()
    }
}

/// `(sum x_j^2)(sum y_k^2) - sum z_i^2 == 0` by symbolic expansion.
pub fn verify_by_expansion(f: &SosFormula) -> bool {
    let t = f.sos_type;
    let nv = t.r + t.s;
    let one = f.field.one();
    let sq = |v: usize| Polynomial::monomial(one.clone(), Monomial::var(nv, v).mul(&Monomial::var(nv, v)));
    let mut xs = Polynomial::zero(nv);
    for j in 0..t.r {
        xs = &xs + &sq(j);
    }
    let mut ys = Polynomial::zero(nv);
    for k in 0..t.s {
        ys = &ys + &sq(t.r + k);
    }
    let mut diff = &xs * &ys;
    for z in f.z_polynomials() {
        diff = &diff - &(&z * &z);
    }
    diff.is_zero()
}

/// Every ideal generator vanishes at the tensor.
pub fn verify_by_generators(f: &SosFormula) -> bool {
    let spec = gen_sos_ideal(f.sos_type);
    spec.generators_over(&f.field)
        .iter()
        .all(|g| g.evaluate(&f.alpha).map(|v| v.is_zero()).unwrap_or(false))
}

/// Checks the formula both ways and fails loudly if the two checks disagree.
pub fn verify_formula(f: &SosFormula) -> Result<bool, SosError> {
    let a = verify_by_expansion(f);
    let b = verify_by_generators(f);
    if a != b {
        return Err(SosError::Disagreement);
    }
    Ok(a)
}

/// Product of basis units in the Cayley-Dickson algebra of dimension `dim`:
/// `e_a * e_b = sign * e_c`.
fn cd_mul(a: usize, b: usize, dim: usize) -> (i64, usize) {
    if dim == 1 {
        return (1, 0);
    }
    let h = dim / 2;
    let conj = |x: usize| if x == 0 { 1 } else { -1 };
    match (a < h, b < h) {
        (true, true) => cd_mul(a, b, h),
        // (a,0)(0,d) = (0, d a)
        (true, false) => {
            let (sg, c) = cd_mul(b - h, a, h);
            (sg, c + h)
        }
        // (0,b)(c,0) = (0, b conj(c))
        (false, true) => {
            let (sg, c) = cd_mul(a - h, b, h);
            (sg * conj(b), c + h)
        }
        // (0,b)(0,d) = (-conj(d) b, 0)
        (false, false) => {
            let (sg, c) = cd_mul(b - h, a - h, h);
            (-sg * conj(b - h), c)
        }
    }
}

/// The classical `[n,n,n]` formulas from the real numbers, complex numbers,
/// quaternions and octonions.
pub fn catalog(n: usize, field: &Field) -> Result<SosFormula, SosError> {
    if !matches!(n, 1 | 2 | 4 | 8) {
        return Err(SosError::UnsupportedCatalog(n));
    }
    let t = SosType::new(n, n, n)?;
    let mut signs = vec![vec![vec![0i64; n]; n]; n];
    for j in 0..n {
        for k in 0..n {
            let (sg, i) = cd_mul(j, k, n);
            signs[i][j][k] = sg;
        }
    }
    SosFormula::from_fn(t, field.clone(), |i, j, k| field.from_i64(signs[i - 1][j - 1][k - 1]))
}

/// Entrywise image of a rational formula in `F_p`.
pub fn reduce_formula_mod_p(f: &SosFormula, p: u64) -> Result<SosFormula, SosError> {
    if f.field != Field::Rational {
        return Err(SosError::NotRational);
    }
    let target = Field::prime(p)?;
    let alpha = f
        .alpha
        .iter()
        .map(|a| target.from_rational(a.as_rational().expect("rational entry")))
        .collect::<Result<Vec<_>, _>>()?;
    SosFormula::new(f.sos_type, target, alpha)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Existence {
    /// The ideal is proper: a formula exists over the algebraic closure.
    Exists,
    /// The ideal is the unit ideal.
    DoesNotExist,
    /// The resource cap was reached first.
    Undecided { pairs: usize, basis: usize },
}

fn decide<C: Coefficient>(gens: &[Polynomial<C>], config: &BuchbergerConfig) -> Result<Existence, SosError> {
    match buchberger(gens, config) {
        Ok(gb) if gb.contains_unit() => Ok(Existence::DoesNotExist),
        Ok(_) => Ok(Existence::Exists),
        Err(GroebnerError::ResourceCap { pairs, basis }) => Ok(Existence::Undecided { pairs, basis }),
        Err(e) => Err(e.into()),
    }
}

/// Decides whether a formula of type `t` exists over the algebraic closure of `field`.
pub fn exists_over(t: SosType, field: &Field, config: &BuchbergerConfig) -> Result<Existence, SosError> {
    let spec = gen_sos_ideal(t);
    match field {
        Field::Rational => decide(&spec.generators, config),
        Field::Prime(pf) => decide(&spec.generators_like::<Fp>(&pf.one()), config),
        Field::Extension(ef) => decide(&spec.generators_like::<Fq>(&ef.constant(1)), config),
    }
}
