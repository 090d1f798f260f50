//! Python bindings for `sosfield`.

use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sosfield::bounds::{
    buchberger_step_bound, charp_threshold, dube_bound, field_degree_bound, growth_bound, BoundConfig, BoundParams,
    BoundValue, ExponentMode, DEFAULT_BIT_CAP,
};
use sosfield::fields::{Coefficient, Field as CoreField, Rational};
use sosfield::format::{to_pretty, FormulaJson, IdealJson};
use sosfield::groebner::{buchberger, trace_max_p, BuchbergerConfig, GroebnerError};
use sosfield::poly::Polynomial;
use sosfield::search::{search as core_search, Emit, SearchConfig, SearchStatus, Strategy};
use sosfield::sos::{
    catalog as core_catalog, exists_over, gen_sos_ideal, reduce_formula_mod_p, verify_formula, Existence, SosFormula,
    SosType as CoreType,
};
use sosfield::zeta::{
    bombieri_bound as core_bombieri, count_all, predict_counts as core_predict, reconstruct_zeta, reduce_system,
    series_from_counts, ZetaFunction,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field_for(p: Option<u64>, k: usize) -> PyResult<CoreField> {
    match p {
        None if k == 1 => Ok(CoreField::Rational),
        None => Err(PyValueError::new_err("an extension degree needs a prime")),
        Some(p) => CoreField::finite(p, k).map_err(err),
    }
}

/// A coefficient field: `Field()` is Q, `Field(p)` is F_p, `Field(p, k)` is F_{p^k}.
#[pyclass(frozen, from_py_object, module = "pysosfield")]
#[derive(Clone)]
struct Field {
    inner: CoreField,
}

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (p=None, k=1))]
    fn new(p: Option<u64>, k: usize) -> PyResult<Self> {
        Ok(Field { inner: field_for(p, k)? })
    }

    #[getter]
    fn characteristic(&self) -> u64 {
        self.inner.characteristic()
    }

    #[getter]
    fn order(&self) -> Option<u64> {
        self.inner.order()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.inner)
    }

    fn __eq__(&self, other: &Field) -> bool {
        self.inner == other.inner
    }
}

/// The type `[r, s, n]` of a sums-of-squares formula.
#[pyclass(frozen, from_py_object, module = "pysosfield")]
#[derive(Clone, Copy)]
struct SosType {
    inner: CoreType,
}

#[pymethods]
impl SosType {
    #[new]
    fn new(r: usize, s: usize, n: usize) -> PyResult<Self> {
        Ok(SosType {
            inner: CoreType::new(r, s, n).map_err(err)?,
        })
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    #[getter]
    fn generator_count(&self) -> usize {
        self.inner.generator_count()
    }

    /// Generators of the ideal as strings in the variables `x{i}_{j}_{k}`.
    fn generators(&self) -> Vec<String> {
        let ix = self.inner.indexer();
        gen_sos_ideal(self.inner)
            .generators
            .iter()
            .map(|g| g.fmt_with(&|v| ix.name(v)))
            .collect()
    }

    /// The ideal as interchange JSON.
    fn ideal_json(&self) -> String {
        to_pretty(&IdealJson::from_spec(&gen_sos_ideal(self.inner)))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SosType({}, {}, {})", self.inner.r, self.inner.s, self.inner.n)
    }
}

/// A coefficient tensor `a[i][j][k]` over a field.
#[pyclass(frozen, from_py_object, module = "pysosfield")]
#[derive(Clone)]
struct Formula {
    inner: SosFormula,
}

#[pymethods]
impl Formula {
    /// Builds a formula from a nested `alpha[i][j][k]` list of element strings or integers.
    #[new]
    #[pyo3(signature = (alpha, field=None))]
    fn new(alpha: Vec<Vec<Vec<Bound<'_, PyAny>>>>, field: Option<Field>) -> PyResult<Self> {
        let field = field.map(|f| f.inner).unwrap_or(CoreField::Rational);
        let n = alpha.len();
        let r = alpha.first().map_or(0, Vec::len);
        let s = alpha.first().and_then(|a| a.first()).map_or(0, Vec::len);
        let t = CoreType::new(r, s, n).map_err(err)?;
        let mut flat = vec![field.zero(); t.nvars()];
        let ix = t.indexer();
        for (i, plane) in alpha.iter().enumerate() {
            if plane.len() != r {
                return Err(PyValueError::new_err("ragged alpha"));
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != s {
                    return Err(PyValueError::new_err("ragged alpha"));
                }
                for (k, v) in row.iter().enumerate() {
                    let text = v.str()?.to_string();
                    flat[ix.flat(i + 1, j + 1, k + 1)] = field.parse_element(&text).map_err(err)?;
                }
            }
        }
        Ok(Formula {
            inner: SosFormula::new(t, field, flat).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = FormulaJson::parse(text).map_err(err)?;
        Ok(Formula {
            inner: doc.to_formula().map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        to_pretty(&FormulaJson::from_formula(&self.inner))
    }

    #[getter]
    fn sos_type(&self) -> SosType {
        SosType {
            inner: self.inner.sos_type(),
        }
    }

    #[getter]
    fn field(&self) -> Field {
        Field {
            inner: self.inner.field().clone(),
        }
    }

    /// Entries as strings, nested `[i][j][k]`.
    #[getter]
    fn alpha(&self) -> Vec<Vec<Vec<String>>> {
        self.inner
            .nested()
            .into_iter()
            .map(|p| p.into_iter().map(|r| r.into_iter().map(|e| e.to_string()).collect()).collect())
            .collect()
    }

    /// `z_1..z_n` as bilinear forms in `x1..xr`, `y1..ys`.
    fn z(&self) -> Vec<String> {
        self.inner.display_z()
    }

    fn verify(&self) -> PyResult<bool> {
        verify_formula(&self.inner).map_err(err)
    }

    /// Image of a rational formula in `F_p`.
    fn reduce_mod(&self, p: u64) -> PyResult<Formula> {
        Ok(Formula {
            inner: reduce_formula_mod_p(&self.inner, p).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Formula({} over {})", self.inner.sos_type(), self.inner.field())
    }
}

/// The classical `[n, n, n]` formula for `n` in {1, 2, 4, 8}.
#[pyfunction]
#[pyo3(signature = (n, p=None))]
fn catalog(n: usize, p: Option<u64>) -> PyResult<Formula> {
    Ok(Formula {
        inner: core_catalog(n, &field_for(p, 1)?).map_err(err)?,
    })
}

/// Outcome of a Gröbner basis computation.
#[pyclass(frozen, get_all, module = "pysosfield")]
struct GroebnerResult {
    proper: bool,
    basis: Vec<String>,
    extension_steps: usize,
    pairs_processed: usize,
    max_p: Option<BigUint>,
}

#[pymethods]
impl GroebnerResult {
    fn __repr__(&self) -> String {
        format!(
            "GroebnerResult(proper={}, basis_len={}, extension_steps={})",
            self.proper,
            self.basis.len(),
            self.extension_steps
        )
    }
}

fn run_groebner<C: Coefficient>(
    gens: &[Polynomial<C>],
    cfg: &BuchbergerConfig,
    t: CoreType,
) -> PyResult<GroebnerResult> {
    let gb = match buchberger(gens, cfg) {
        Ok(gb) => gb,
        Err(GroebnerError::ResourceCap { pairs, basis }) => {
            return Err(PyValueError::new_err(format!(
                "undecided: resource cap after {pairs} S-pairs ({basis} basis elements)"
            )))
        }
        Err(e) => return Err(err(e)),
    };
    let ix = t.indexer();
    Ok(GroebnerResult {
        proper: !gb.contains_unit(),
        basis: gb.basis.iter().map(|g| g.fmt_with(&|v| ix.name(v))).collect(),
        extension_steps: gb.trace.extension_steps,
        pairs_processed: gb.trace.pairs_processed,
        max_p: trace_max_p(&gb.trace).ok(),
    })
}

/// Buchberger's algorithm on the ideal of type `t` over Q or F_p.
#[pyfunction]
#[pyo3(signature = (t, p=None, max_pairs=None, product_criterion=false, interreduce=false))]
fn groebner(
    t: SosType,
    p: Option<u64>,
    max_pairs: Option<usize>,
    product_criterion: bool,
    interreduce: bool,
) -> PyResult<GroebnerResult> {
    let spec = gen_sos_ideal(t.inner);
    let cfg = BuchbergerConfig {
        product_criterion,
        normalize_monic: p.is_some(),
        interreduce,
        max_pairs,
        ..Default::default()
    };
    match p {
        None => run_groebner(&spec.generators, &cfg, t.inner),
        Some(p) => {
            let f = sosfield::fields::PrimeField::new(p).map_err(err)?;
            run_groebner(&spec.generators_like(&f.one()), &cfg, t.inner)
        }
    }
}

/// `"exists"`, `"does-not-exist"` or `"undecided"` over the algebraic closure of the field.
#[pyfunction]
#[pyo3(signature = (t, p=None, k=1, max_pairs=None))]
fn exists(t: SosType, p: Option<u64>, k: usize, max_pairs: Option<usize>) -> PyResult<&'static str> {
    let field = field_for(p, k)?;
    let cfg = BuchbergerConfig {
        normalize_monic: field.is_finite(),
        max_pairs,
        ..Default::default()
    };
    Ok(match exists_over(t.inner, &field, &cfg).map_err(err)? {
        Existence::Exists => "exists",
        Existence::DoesNotExist => "does-not-exist",
        Existence::Undecided { .. } => "undecided",
    })
}

/// Outcome of a finite-field search.
#[pyclass(frozen, get_all, module = "pysosfield")]
struct SearchResult {
    status: String,
    count: u64,
    nodes: u64,
    formulas: Vec<Formula>,
}

#[pymethods]
impl SearchResult {
    fn __repr__(&self) -> String {
        format!("SearchResult(status={:?}, count={}, nodes={})", self.status, self.count, self.nodes)
    }
}

/// Searches `F_{p^k}` for formulas of type `t`.
#[pyfunction]
#[pyo3(signature = (t, p, k=1, strategy="backtracking", emit="first", node_budget=None, parallel=false))]
fn search(
    t: SosType,
    p: u64,
    k: usize,
    strategy: &str,
    emit: &str,
    node_budget: Option<u64>,
    parallel: bool,
) -> PyResult<SearchResult> {
    let mut cfg = SearchConfig::new(t.inner, CoreField::finite(p, k).map_err(err)?);
    cfg.strategy = match strategy {
        "naive" => Strategy::Naive,
        "backtracking" => Strategy::Backtracking,
        other => return Err(PyValueError::new_err(format!("unknown strategy {other:?}"))),
    };
    cfg.emit = match emit {
        "first" => Emit::First,
        "all" => Emit::All,
        "count" => Emit::Count,
        other => return Err(PyValueError::new_err(format!("unknown emit mode {other:?}"))),
    };
    cfg.node_budget = node_budget;
    cfg.parallel = parallel;
    let out = core_search(&cfg).map_err(err)?;
    Ok(SearchResult {
        status: match out.status {
            SearchStatus::Found => "found",
            SearchStatus::ExhaustedNone => "exhausted-none",
            SearchStatus::BudgetExceeded => "budget-exceeded",
        }
        .into(),
        count: out.count,
        nodes: out.nodes,
        formulas: out.formulas.into_iter().map(|inner| Formula { inner }).collect(),
    })
}

/// `N_1..N_kmax`: points of the ideal of type `t` over `F_{p^k}`.
#[pyfunction]
#[pyo3(signature = (t, p, kmax, budget=100_000_000))]
fn count_points(t: SosType, p: u64, kmax: usize, budget: u64) -> PyResult<Vec<BigUint>> {
    let system = reduce_system(&gen_sos_ideal(t.inner).generators, p).map_err(err)?;
    Ok(count_all(&system, p, kmax, budget).map_err(err)?.counts)
}

/// Reconstructs `(R1, R2)` with `Z = R1 / R2` from point counts.
#[pyfunction]
#[pyo3(signature = (counts, d1, d2, cancel=true))]
fn zeta(counts: Vec<BigUint>, d1: usize, d2: usize, cancel: bool) -> PyResult<(Vec<BigInt>, Vec<BigInt>)> {
    let series = series_from_counts(&counts, counts.len()).map_err(err)?;
    let zf = reconstruct_zeta(&series, d1, d2, cancel).map_err(err)?;
    Ok((zf.r1, zf.r2))
}

/// `N_1..N_horizon` predicted by `Z = R1 / R2`.
#[pyfunction]
fn predict_counts(r1: Vec<BigInt>, r2: Vec<BigInt>, horizon: usize) -> PyResult<Vec<BigInt>> {
    let zf = ZetaFunction::new(r1, r2).map_err(err)?;
    core_predict(&zf, horizon).map_err(err)
}

#[pyfunction]
fn bombieri_bound(d: u64, n: u64, m: u64) -> BigUint {
    core_bombieri(d, n, m)
}

fn bound_pair(v: BoundValue) -> (String, PyBound) {
    let tier = v.tier_name().to_string();
    let payload = match v {
        BoundValue::Exact(x) | BoundValue::Log2Exact(x) => PyBound::Int(x),
        BoundValue::LogLog2Approx(f) => PyBound::Float(f),
    };
    (tier, payload)
}

#[derive(IntoPyObject)]
enum PyBound {
    Int(BigUint),
    Float(f64),
}

/// `(tier, payload)` for the degree bound of a Gröbner basis in `v` variables.
#[pyfunction]
#[pyo3(signature = (d, v, bit_cap=DEFAULT_BIT_CAP))]
fn dube(d: u64, v: u64, bit_cap: u64) -> (String, PyBound) {
    bound_pair(dube_bound(d, v, &BoundConfig { bit_cap }))
}

/// Every closed-form bound for type `t`, as `{name: (tier, payload)}`.
#[pyfunction]
#[pyo3(signature = (t, mode="as-stated", bit_cap=DEFAULT_BIT_CAP))]
fn bounds(t: SosType, mode: &str, bit_cap: u64) -> PyResult<Vec<(String, (String, PyBound))>> {
    let mode = match mode {
        "as-stated" => ExponentMode::AsStated,
        "dube-consistent" => ExponentMode::DubeConsistent,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let cfg = BoundConfig { bit_cap };
    let params = BoundParams::new(t.inner, mode);
    Ok(vec![
        ("dube_degree".into(), bound_pair(params.dube_degree().to_bound(&cfg))),
        ("q".into(), bound_pair(params.q().to_bound(&cfg))),
        ("step_bound".into(), bound_pair(buchberger_step_bound(&params, &cfg))),
        ("charp_threshold".into(), bound_pair(charp_threshold(&params, &cfg))),
        ("field_degree".into(), bound_pair(field_degree_bound(t.inner, &cfg))),
        ("growth_after_one_step".into(), bound_pair(growth_bound(&params, &BigUint::from(1u32), &cfg))),
    ])
}

/// Height `max(|a|, b)` of the rational `a/b`.
#[pyfunction]
fn p_measure(num: BigInt, den: BigInt) -> PyResult<BigUint> {
    Ok(Rational::new(num, den).map_err(err)?.p_measure().0)
}

#[pymodule]
fn pysosfield(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<SosType>()?;
    m.add_class::<Formula>()?;
    m.add_class::<GroebnerResult>()?;
    m.add_class::<SearchResult>()?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(groebner, m)?)?;
    m.add_function(wrap_pyfunction!(exists, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(count_points, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(predict_counts, m)?)?;
    m.add_function(wrap_pyfunction!(bombieri_bound, m)?)?;
    m.add_function(wrap_pyfunction!(dube, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(p_measure, m)?)?;
    Ok(())
}
