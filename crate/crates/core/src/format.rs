//! Versioned JSON interchange formats.
//!
//! Every file carries `"format": 1`. Big integers and rationals are decimal
//! strings (`"a"` or `"a/b"`); elements of `F_{p^k}` are written as their
//! residue coefficients `"c0,c1,..."`, constant term first. Polynomial terms
//! appear in descending degrevlex order.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundValue;
use crate::fields::{Coefficient, ExtensionField, Field, FieldElement, FieldError, Rational};
use crate::groebner::GroebnerTrace;
use crate::poly::Polynomial;
use crate::search::{SearchOutcome, SearchStatus};
use crate::sos::{gen_sos_ideal, SosError, SosFormula, SosIdealSpec, SosType};
use crate::zeta::{PointCounts, ZetaFunction};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("expected a {expected} file, found {found:?}")]
    Kind { expected: &'static str, found: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Sos(#[from] SosError),
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

fn parse_int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, FormatError> {
    s.trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: cannot parse {s:?}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldJson {
    Q,
    Fp { p: String },
    Fpk { p: String, k: usize, modulus: Vec<String> },
}

impl FieldJson {
    pub fn from_field(field: &Field) -> Self {
        match field {
            Field::Rational => FieldJson::Q,
            Field::Prime(f) => FieldJson::Fp { p: f.p().to_string() },
            Field::Extension(e) => FieldJson::Fpk {
                p: e.p().to_string(),
                k: e.degree(),
                modulus: e.modulus().iter().map(u64::to_string).collect(),
            },
        }
    }

    pub fn to_field(&self) -> Result<Field, FormatError> {
        match self {
            FieldJson::Q => Ok(Field::Rational),
            FieldJson::Fp { p } => Ok(Field::prime(parse_int(p, "p")?)?),
            FieldJson::Fpk { p, k, modulus } => {
                let p: u64 = parse_int(p, "p")?;
                let modulus = modulus
                    .iter()
                    .map(|c| parse_int::<u64>(c, "modulus"))
                    .collect::<Result<Vec<_>, _>>()?;
                let ext = ExtensionField::with_modulus(p, modulus)?;
                if ext.degree() != *k {
                    return Err(invalid(format!("modulus degree {} differs from k = {k}", ext.degree())));
                }
                Ok(Field::Extension(Arc::new(ext)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: String,
    pub e: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: usize,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn from_poly<C: Coefficient>(f: &Polynomial<C>) -> Self {
        PolyJson {
            vars: f.nvars(),
            terms: f
                .terms()
                .iter()
                .map(|t| TermJson {
                    c: t.coeff.to_string(),
                    e: t.mono.exps().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self, field: &Field) -> Result<Polynomial<FieldElement>, FormatError> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.e.len() != self.vars {
                    return Err(invalid(format!(
                        "exponent vector of length {} in a ring of {} variables",
                        t.e.len(),
                        self.vars
                    )));
                }
                Ok((field.parse_element(&t.c)?, crate::poly::Monomial::new(t.e.clone())))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(Polynomial::from_terms(self.vars, terms))
    }

    pub fn to_rational_poly(&self) -> Result<Polynomial<Rational>, FormatError> {
        let f = self.to_poly(&Field::Rational)?;
        Ok(f.map_coeffs(|c| c.as_rational().unwrap().clone()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeJson {
    pub r: usize,
    pub s: usize,
    pub n: usize,
}

impl TypeJson {
    pub fn to_type(self) -> Result<SosType, FormatError> {
        Ok(SosType::new(self.r, self.s, self.n)?)
    }
}

impl From<SosType> for TypeJson {
    fn from(t: SosType) -> Self {
        TypeJson {
            r: t.r,
            s: t.s,
            n: t.n,
        }
    }
}

/// A polynomial system, optionally tagged with the formula type it encodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealJson {
    pub format: u32,
    pub kind: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub sos_type: Option<TypeJson>,
    pub field: FieldJson,
    pub vars: usize,
    pub var_names: Vec<String>,
    pub generators: Vec<PolyJson>,
}

fn check_header(format: u32, kind: &str, expected: &'static str) -> Result<(), FormatError> {
    if format != FORMAT_VERSION {
        return Err(FormatError::Version(format));
    }
    if kind != expected {
        return Err(FormatError::Kind {
            expected,
            found: kind.to_string(),
        });
    }
    Ok(())
}

impl IdealJson {
    pub fn from_spec(spec: &SosIdealSpec) -> Self {
        let ix = spec.sos_type.indexer();
        IdealJson {
            format: FORMAT_VERSION,
            kind: "ideal".into(),
            sos_type: Some(spec.sos_type.into()),
            field: FieldJson::Q,
            vars: ix.nvars(),
            var_names: (0..ix.nvars()).map(|v| ix.name(v)).collect(),
            generators: spec.generators.iter().map(PolyJson::from_poly).collect(),
        }
    }

    pub fn from_system<C: Coefficient>(field: &Field, system: &[Polynomial<C>], vars: usize) -> Self {
        IdealJson {
            format: FORMAT_VERSION,
            kind: "ideal".into(),
            sos_type: None,
            field: FieldJson::from_field(field),
            vars,
            var_names: (0..vars).map(|v| format!("x{v}")).collect(),
            generators: system.iter().map(PolyJson::from_poly).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let doc: IdealJson = serde_json::from_str(text)?;
        check_header(doc.format, &doc.kind, "ideal")?;
        if doc.var_names.len() != doc.vars {
            return Err(invalid("var_names length differs from vars"));
        }
        if let Some(g) = doc.generators.iter().find(|g| g.vars != doc.vars) {
            return Err(invalid(format!("generator in {} variables, ideal has {}", g.vars, doc.vars)));
        }
        if let Some(t) = doc.sos_type {
            let t = t.to_type()?;
            if t.nvars() != doc.vars {
                return Err(invalid("type does not match variable count"));
            }
        }
        Ok(doc)
    }

    /// Generators in canonical form over the declared field.
    pub fn generators(&self) -> Result<(Field, Vec<Polynomial<FieldElement>>), FormatError> {
        let field = self.field.to_field()?;
        let gens = self
            .generators
            .iter()
            .map(|g| g.to_poly(&field))
            .collect::<Result<_, _>>()?;
        Ok((field, gens))
    }

    /// Re-serializes from the parsed polynomials, so non-canonical input comes out canonical.
    pub fn canonical(&self) -> Result<Self, FormatError> {
        let (field, gens) = self.generators()?;
        let mut out = IdealJson::from_system(&field, &gens, self.vars);
        out.sos_type = self.sos_type;
        out.var_names = self.var_names.clone();
        Ok(out)
    }

    /// Whether the generators are exactly those of the tagged formula type.
    pub fn matches_type(&self) -> Result<bool, FormatError> {
        let Some(t) = self.sos_type else {
            return Ok(false);
        };
        let spec = gen_sos_ideal(t.to_type()?);
        let ours: Vec<PolyJson> = spec.generators.iter().map(PolyJson::from_poly).collect();
        Ok(self.field == FieldJson::Q && self.generators == ours)
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaJson {
    pub format: u32,
    pub kind: String,
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub field: FieldJson,
    /// `alpha[i][j][k]`, zero-based.
    pub alpha: Vec<Vec<Vec<String>>>,
}

impl FormulaJson {
    pub fn from_formula(f: &SosFormula) -> Self {
        let t = f.sos_type();
        FormulaJson {
            format: FORMAT_VERSION,
            kind: "formula".into(),
            r: t.r,
            s: t.s,
            n: t.n,
            field: FieldJson::from_field(f.field()),
            alpha: f
                .nested()
                .iter()
                .map(|m| m.iter().map(|row| row.iter().map(|a| a.to_string()).collect()).collect())
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let doc: FormulaJson = serde_json::from_str(text)?;
        check_header(doc.format, &doc.kind, "formula")?;
        Ok(doc)
    }

    pub fn to_formula(&self) -> Result<SosFormula, FormatError> {
        let t = SosType::new(self.r, self.s, self.n)?;
        let field = self.field.to_field()?;
        let shape_ok = self.alpha.len() == t.n
            && self
                .alpha
                .iter()
                .all(|m| m.len() == t.r && m.iter().all(|row| row.len() == t.s));
        if !shape_ok {
            return Err(invalid(format!("alpha must have shape {} x {} x {}", t.n, t.r, t.s)));
        }
        let alpha = &self.alpha;
        let mut err = None;
        let f = SosFormula::from_fn(t, field.clone(), |i, j, k| {
            field.parse_element(&alpha[i - 1][j - 1][k - 1]).unwrap_or_else(|e| {
                err.get_or_insert(e);
                field.zero()
            })
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        Ok(f?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub step: usize,
    pub pair: [usize; 2],
    pub lcm_degree: u32,
    pub remainder_degree: Option<u32>,
    pub extended: bool,
    pub basis_len: usize,
    pub extension_steps: usize,
    pub max_p: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub format: u32,
    pub kind: String,
    pub field: FieldJson,
    pub initial_max_p: Option<String>,
    pub extension_steps: usize,
    pub pairs_processed: usize,
    pub pairs_skipped: usize,
    pub stopped_on_unit: bool,
    pub steps: Vec<StepJson>,
}

impl TraceJson {
    pub fn from_trace(field: &Field, trace: &GroebnerTrace) -> Self {
        TraceJson {
            format: FORMAT_VERSION,
            kind: "trace".into(),
            field: FieldJson::from_field(field),
            initial_max_p: trace.initial_max_p.as_ref().map(BigUint::to_string),
            extension_steps: trace.extension_steps,
            pairs_processed: trace.pairs_processed,
            pairs_skipped: trace.pairs_skipped,
            stopped_on_unit: trace.stopped_on_unit,
            steps: trace
                .records
                .iter()
                .map(|r| StepJson {
                    step: r.step,
                    pair: [r.pair.0, r.pair.1],
                    lcm_degree: r.lcm_degree,
                    remainder_degree: r.remainder_degree,
                    extended: r.extended,
                    basis_len: r.basis_len,
                    extension_steps: r.extension_steps,
                    max_p: r.max_p.as_ref().map(BigUint::to_string),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let doc: TraceJson = serde_json::from_str(text)?;
        check_header(doc.format, &doc.kind, "trace")?;
        Ok(doc)
    }

    /// `(extension step, max P)` after every basis extension, starting from the input.
    pub fn max_p_by_extension(&self) -> Result<Vec<(usize, BigUint)>, FormatError> {
        let parse = |s: &Option<String>| -> Result<BigUint, FormatError> {
            let s = s.as_ref().ok_or_else(|| invalid("trace has no coefficient heights"))?;
            parse_int(s, "max_p")
        };
        let mut out = vec![(0, parse(&self.initial_max_p)?)];
        for st in self.steps.iter().filter(|s| s.extended) {
            out.push((st.extension_steps, parse(&st.max_p)?));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisJson {
    pub format: u32,
    pub kind: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub sos_type: Option<TypeJson>,
    pub field: FieldJson,
    pub proper: bool,
    pub vars: usize,
    pub basis: Vec<PolyJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchJson {
    pub format: u32,
    pub kind: String,
    #[serde(rename = "type")]
    pub sos_type: TypeJson,
    pub field: FieldJson,
    pub strategy: String,
    pub emit: String,
    pub status: String,
    pub count: String,
    pub nodes: String,
    pub formulas: Vec<FormulaJson>,
}

pub fn status_name(s: SearchStatus) -> &'static str {
    match s {
        SearchStatus::Found => "found",
        SearchStatus::ExhaustedNone => "exhausted-none",
        SearchStatus::BudgetExceeded => "budget-exceeded",
    }
}

impl SearchJson {
    pub fn from_outcome(t: SosType, field: &Field, strategy: &str, emit: &str, o: &SearchOutcome) -> Self {
        SearchJson {
            format: FORMAT_VERSION,
            kind: "search".into(),
            sos_type: t.into(),
            field: FieldJson::from_field(field),
            strategy: strategy.into(),
            emit: emit.into(),
            status: status_name(o.status).into(),
            count: o.count.to_string(),
            nodes: o.nodes.to_string(),
            formulas: o.formulas.iter().map(FormulaJson::from_formula).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsJson {
    pub format: u32,
    pub kind: String,
    pub p: String,
    pub kmax: usize,
    /// `N_1..N_kmax`
    pub counts: Vec<String>,
}

impl CountsJson {
    pub fn from_counts(c: &PointCounts) -> Self {
        CountsJson {
            format: FORMAT_VERSION,
            kind: "counts".into(),
            p: c.p.to_string(),
            kmax: c.counts.len(),
            counts: c.counts.iter().map(BigUint::to_string).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let doc: CountsJson = serde_json::from_str(text)?;
        check_header(doc.format, &doc.kind, "counts")?;
        if doc.counts.len() != doc.kmax {
            return Err(invalid("counts length differs from kmax"));
        }
        Ok(doc)
    }

    pub fn to_counts(&self) -> Result<PointCounts, FormatError> {
        Ok(PointCounts {
            p: parse_int(&self.p, "p")?,
            counts: self
                .counts
                .iter()
                .map(|c| parse_int(c, "count"))
                .collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaJson {
    pub format: u32,
    pub kind: String,
    pub p: String,
    pub d1: usize,
    pub d2: usize,
    pub counts: Vec<String>,
    pub series: Vec<String>,
    /// Coefficients of `R1`, constant term first.
    pub r1: Vec<String>,
    pub r2: Vec<String>,
}

impl ZetaJson {
    pub fn new(counts: &PointCounts, series: &[BigInt], d1: usize, d2: usize, zf: &ZetaFunction) -> Self {
        let strs = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect();
        ZetaJson {
            format: FORMAT_VERSION,
            kind: "zeta".into(),
            p: counts.p.to_string(),
            d1,
            d2,
            counts: counts.counts.iter().map(BigUint::to_string).collect(),
            series: strs(series),
            r1: strs(&zf.r1),
            r2: strs(&zf.r2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundJson {
    pub tier: String,
    /// Decimal string for the integer tiers; a number, or `"inf"`, for the floating tier.
    pub payload: serde_json::Value,
}

impl BoundJson {
    pub fn from_value(v: &BoundValue) -> Self {
        let payload = match v {
            BoundValue::Exact(x) | BoundValue::Log2Exact(x) => serde_json::Value::String(x.to_string()),
            BoundValue::LogLog2Approx(f) => serde_json::Number::from_f64(*f)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(if *f > 0.0 { "inf" } else { "nan" }.into())),
        };
        BoundJson {
            tier: v.tier_name().into(),
            payload,
        }
    }
}
