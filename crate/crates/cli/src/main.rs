//! `sosfield` command-line front end.
//!
//! Exit codes: 0 success or true, 2 usage or precondition failure,
//! 3 negative mathematical result, 4 undecided (resource cap),
//! 5 inconsistent data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use num_bigint::{BigInt, BigUint};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sosfield::bounds::{
    buchberger_step_bound, charp_threshold, field_degree_bound, growth_bound, log2_big,
    BoundConfig, BoundParams, BoundValue, ExponentMode, DEFAULT_BIT_CAP,
};
use sosfield::fields::{Coefficient, Field, FieldElement, Fp, Fq, Rational};
use sosfield::format::{
    to_pretty, BasisJson, BoundJson, CountsJson, FieldJson, FormulaJson, IdealJson, PolyJson,
    SearchJson, TraceJson, TypeJson, ZetaJson, FORMAT_VERSION,
};
use sosfield::groebner::{buchberger, BuchbergerConfig, GroebnerError};
use sosfield::poly::Polynomial;
use sosfield::search::{search, Emit, SearchConfig, SearchStatus, Strategy};
use sosfield::sos::{catalog, gen_sos_ideal, reduce_formula_mod_p, verify_formula, SosType};
use sosfield::zeta::{
    bombieri_bound, count_all, predict_counts, reconstruct_zeta, reduce_system, series_from_counts,
    ZetaError,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;
const EXIT_UNDECIDED: u8 = 4;
const EXIT_INCONSISTENT: u8 = 5;

#[derive(Parser)]
#[command(name = "sosfield", version, about = "Sums-of-squares formulas: ideals, Gröbner bases, search, zeta functions, bounds")]
struct Cli {
    /// Worker threads for parallel search and point counting (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the ideal of formulas of type [r,s,n].
    Ideal {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run Buchberger's algorithm on an ideal file; exit 0 if proper, 3 if the unit ideal.
    Groebner(GroebnerArgs),
    /// Search a finite field for explicit formulas.
    Search(SearchArgs),
    /// Count points and reconstruct the zeta function.
    Zeta(ZetaArgs),
    /// Evaluate the closed-form bounds for a type.
    Bounds(BoundsArgs),
    /// Check a formula file; exit 0 if it is a valid identity, 3 if not.
    Verify {
        #[arg(long)]
        formula: PathBuf,
        /// Reduce a rational formula modulo this prime first.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Write a classical [n,n,n] formula (n = 1, 2, 4 or 8).
    Catalog {
        #[arg(long)]
        n: usize,
        /// Coefficient field: Q when omitted, otherwise F_p.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct Dims {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    n: usize,
}

impl Dims {
    fn to_type(self) -> Result<SosType, Failure> {
        SosType::new(self.r, self.s, self.n).map_err(|e| Failure::usage(e.to_string()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldKind {
    Q,
    Fp,
}

#[derive(Args)]
struct GroebnerArgs {
    #[arg(long)]
    input: PathBuf,
    /// Coefficient field; defaults to the field declared in the input.
    #[arg(long, value_enum)]
    field: Option<FieldKind>,
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree for runs over F_{p^k}.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Write the per-step trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the basis here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip S-pairs with coprime initial monomials.
    #[arg(long)]
    product_criterion: bool,
    /// Inter-reduce the final basis.
    #[arg(long)]
    interreduce: bool,
    #[arg(long)]
    max_pairs: Option<usize>,
    #[arg(long)]
    max_basis: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    Backtracking,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    First,
    All,
    Count,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    dims: Dims,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Backtracking)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = EmitArg::First)]
    emit: EmitArg,
    #[arg(long)]
    node_budget: Option<u64>,
    /// Soft wall-clock limit in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Split backtracking over the first vector across threads.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ZetaArgs {
    /// Ideal file whose points are counted.
    #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
    input: Option<PathBuf>,
    /// Counts file (instead of counting).
    #[arg(long)]
    counts: Option<PathBuf>,
    #[arg(long, requires = "input")]
    p: Option<u64>,
    #[arg(long, requires = "input")]
    kmax: Option<usize>,
    #[arg(long)]
    d1: usize,
    #[arg(long)]
    d2: usize,
    /// Solve at exactly (d1, d2) instead of the least-degree pair.
    #[arg(long)]
    no_cancel: bool,
    /// Largest number of points to enumerate for one count.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Also write the counts file.
    #[arg(long)]
    counts_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    AsStated,
    DubeConsistent,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, required_unless_present = "input")]
    r: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    s: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    /// Ideal file carrying a type, instead of --r/--s/--n.
    #[arg(long, conflicts_with_all = ["r", "s", "n"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::AsStated)]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
    bit_cap: u64,
    /// Compare the coefficient heights of a rational trace against the growth bound.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn inconsistent(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INCONSISTENT,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match cli.command {
        Command::Ideal { dims, out } => cmd_ideal(dims, out.as_deref()),
        Command::Groebner(a) => cmd_groebner(&a),
        Command::Search(a) => cmd_search(&a),
        Command::Zeta(a) => cmd_zeta(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Verify { formula, p } => cmd_verify(&formula, p),
        Command::Catalog { n, p, out } => cmd_catalog(n, p, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_ideal(dims: Dims, out: Option<&Path>) -> Outcome {
    let spec = gen_sos_ideal(dims.to_type()?);
    emit(&to_pretty(&IdealJson::from_spec(&spec)), out)?;
    Ok(EXIT_OK)
}

fn finite_field(p: u64, k: usize) -> Result<Field, Failure> {
    Field::finite(p, k).map_err(|e| Failure::usage(e.to_string()))
}

struct GroebnerRun {
    proper: bool,
    basis: Vec<PolyJson>,
    trace: sosfield::groebner::GroebnerTrace,
}

fn run_groebner<C: Coefficient>(gens: &[Polynomial<C>], cfg: &BuchbergerConfig) -> Result<GroebnerRun, GroebnerError> {
    let gb = buchberger(gens, cfg)?;
    Ok(GroebnerRun {
        proper: !gb.contains_unit(),
        basis: gb.basis.iter().map(PolyJson::from_poly).collect(),
        trace: gb.trace,
    })
}

fn cmd_groebner(a: &GroebnerArgs) -> Outcome {
    let doc = IdealJson::parse(&read(&a.input)?).map_err(|e| Failure::usage(e.to_string()))?;
    let (declared, gens) = doc.generators().map_err(|e| Failure::usage(e.to_string()))?;
    let field = match (a.field, a.p) {
        (None, None) => declared.clone(),
        (Some(FieldKind::Q), None) => Field::Rational,
        (Some(FieldKind::Q), Some(_)) => return Err(Failure::usage("--p is only valid with --field fp")),
        (Some(FieldKind::Fp) | None, Some(p)) => finite_field(p, a.k)?,
        (Some(FieldKind::Fp), None) => return Err(Failure::usage("--field fp needs --p")),
    };
    if declared != field && declared != Field::Rational {
        return Err(Failure::usage(format!("input is over {declared}, cannot run over {field}")));
    }
    let to_field = |f: &Polynomial<FieldElement>| {
        f.try_map_coeffs(|c| match c {
            FieldElement::Rational(x) => field.from_rational(x),
            other => Ok(other.clone()),
        })
    };
    let gens: Vec<Polynomial<FieldElement>> = gens
        .iter()
        .map(to_field)
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::usage(e.to_string()))?;

    let cfg = BuchbergerConfig {
        product_criterion: a.product_criterion,
        normalize_monic: field.is_finite(),
        interreduce: a.interreduce,
        stop_on_unit: true,
        max_pairs: a.max_pairs,
        max_basis: a.max_basis,
    };
    let run = match &field {
        Field::Rational => {
            let g: Vec<Polynomial<Rational>> = gens
                .iter()
                .map(|f| f.map_coeffs(|c| c.as_rational().unwrap().clone()))
                .collect();
            run_groebner(&g, &cfg)
        }
        Field::Prime(_) => {
            let g: Vec<Polynomial<Fp>> = gens
                .iter()
                .map(|f| {
                    f.map_coeffs(|c| match c {
                        FieldElement::Prime(x) => *x,
                        _ => unreachable!(),
                    })
                })
                .collect();
            run_groebner(&g, &cfg)
        }
        Field::Extension(_) => {
            let g: Vec<Polynomial<Fq>> = gens
                .iter()
                .map(|f| {
                    f.map_coeffs(|c| match c {
                        FieldElement::Ext(x) => x.clone(),
                        _ => unreachable!(),
                    })
                })
                .collect();
            run_groebner(&g, &cfg)
        }
    };
    let run = match run {
        Ok(r) => r,
        Err(GroebnerError::ResourceCap { pairs, basis }) => {
            println!("undecided: resource cap exceeded after {pairs} S-pairs ({basis} basis elements)");
            return Ok(EXIT_UNDECIDED);
        }
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    if let Some(path) = &a.trace {
        emit(&to_pretty(&TraceJson::from_trace(&field, &run.trace)), Some(path))?;
    }
    let out = BasisJson {
        format: FORMAT_VERSION,
        kind: "groebner".into(),
        sos_type: doc.sos_type,
        field: FieldJson::from_field(&field),
        proper: run.proper,
        vars: doc.vars,
        basis: run.basis,
    };
    emit(&to_pretty(&out), a.out.as_deref())?;
    Ok(if run.proper { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_search(a: &SearchArgs) -> Outcome {
    let t = a.dims.to_type()?;
    let field = finite_field(a.p, a.k)?;
    let (strategy, strategy_name) = match a.strategy {
        StrategyArg::Naive => (Strategy::Naive, "naive"),
        StrategyArg::Backtracking => (Strategy::Backtracking, "backtracking"),
    };
    let (emit_mode, emit_name) = match a.emit {
        EmitArg::First => (Emit::First, "first"),
        EmitArg::All => (Emit::All, "all"),
        EmitArg::Count => (Emit::Count, "count"),
    };
    let cfg = SearchConfig {
        sos_type: t,
        field: field.clone(),
        strategy,
        node_budget: a.node_budget,
        time_budget: a.time_budget.map(Duration::from_secs_f64),
        emit: emit_mode,
        parallel: a.parallel,
    };
    let outcome = search(&cfg).map_err(|e| Failure::usage(e.to_string()))?;
    let doc = SearchJson::from_outcome(t, &field, strategy_name, emit_name, &outcome);
    emit(&to_pretty(&doc), a.out.as_deref())?;
    Ok(match outcome.status {
        SearchStatus::Found => EXIT_OK,
        SearchStatus::ExhaustedNone => EXIT_NEGATIVE,
        SearchStatus::BudgetExceeded => EXIT_UNDECIDED,
    })
}

fn zeta_failure(e: ZetaError) -> Failure {
    match e {
        ZetaError::NotEnoughTerms { .. } | ZetaError::Field(_) | ZetaError::NotPrimeField | ZetaError::MixedSystem => {
            Failure::usage(e.to_string())
        }
        ZetaError::BudgetExceeded { .. } => Failure {
            code: EXIT_UNDECIDED,
            message: e.to_string(),
        },
        _ => Failure::inconsistent(e.to_string()),
    }
}

fn cmd_zeta(a: &ZetaArgs) -> Outcome {
    let counts = match (&a.input, &a.counts) {
        (Some(input), None) => {
            let (Some(p), Some(kmax)) = (a.p, a.kmax) else {
                return Err(Failure::usage("--input needs --p and --kmax"));
            };
            if kmax < a.d1 + a.d2 {
                return Err(Failure::usage(format!("--kmax {kmax} is below d1 + d2 = {}", a.d1 + a.d2)));
            }
            let doc = IdealJson::parse(&read(input)?).map_err(|e| Failure::usage(e.to_string()))?;
            if doc.field != FieldJson::Q {
                return Err(Failure::usage("zeta expects an ideal with rational coefficients"));
            }
            let gens: Vec<Polynomial<Rational>> = doc
                .generators
                .iter()
                .map(|g| g.to_rational_poly())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::usage(e.to_string()))?;
            let system = reduce_system(&gens, p).map_err(zeta_failure)?;
            count_all(&system, p, kmax, a.budget).map_err(zeta_failure)?
        }
        (None, Some(path)) => {
            let doc = CountsJson::parse(&read(path)?).map_err(|e| Failure::usage(e.to_string()))?;
            doc.to_counts().map_err(|e| Failure::usage(e.to_string()))?
        }
        _ => return Err(Failure::usage("give exactly one of --input and --counts")),
    };
    if counts.counts.len() < a.d1 + a.d2 {
        return Err(Failure::usage(format!(
            "{} counts given, d1 + d2 = {} needed",
            counts.counts.len(),
            a.d1 + a.d2
        )));
    }
    if let Some(path) = &a.counts_out {
        emit(&to_pretty(&CountsJson::from_counts(&counts)), Some(path))?;
    }
    let k = counts.counts.len();
    let series = series_from_counts(&counts.counts, k).map_err(zeta_failure)?;
    let zf = reconstruct_zeta(&series, a.d1, a.d2, !a.no_cancel).map_err(zeta_failure)?;
    let predicted = predict_counts(&zf, k).map_err(zeta_failure)?;
    let observed: Vec<BigInt> = counts.counts.iter().map(|c| BigInt::from(c.clone())).collect();
    if predicted != observed {
        return Err(Failure::inconsistent("reconstructed zeta function does not reproduce the counts"));
    }
    let doc = ZetaJson::new(&counts, &series.coeffs, a.d1, a.d2, &zf);
    emit(&to_pretty(&doc), a.out.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(serde::Serialize)]
struct BoundsReport {
    format: u32,
    kind: String,
    #[serde(rename = "type")]
    sos_type: TypeJson,
    mode: String,
    bit_cap: u64,
    variables: usize,
    generators: usize,
    dube_degree: BoundJson,
    q: BoundJson,
    step_bound: BoundJson,
    charp_threshold: BoundJson,
    field_degree: BoundJson,
    bombieri: BoundJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_check: Option<TraceCheck>,
}

#[derive(serde::Serialize)]
struct TraceCheck {
    steps_checked: usize,
    max_log2_p: f64,
    within_bound: bool,
}

fn cmd_bounds(a: &BoundsArgs) -> Outcome {
    let t = match &a.input {
        Some(path) => {
            let doc = IdealJson::parse(&read(path)?).map_err(|e| Failure::usage(e.to_string()))?;
            doc.sos_type
                .ok_or_else(|| Failure::usage("ideal file carries no type"))?
                .to_type()
                .map_err(|e| Failure::usage(e.to_string()))?
        }
        None => Dims {
            r: a.r.unwrap(),
            s: a.s.unwrap(),
            n: a.n.unwrap(),
        }
        .to_type()?,
    };
    let mode = match a.mode {
        ModeArg::AsStated => ExponentMode::AsStated,
        ModeArg::DubeConsistent => ExponentMode::DubeConsistent,
    };
    let cfg = BoundConfig { bit_cap: a.bit_cap };
    let params = BoundParams::new(t, mode);
    let trace_check = match &a.trace {
        Some(path) => {
            let doc = TraceJson::parse(&read(path)?).map_err(|e| Failure::usage(e.to_string()))?;
            let heights = doc.max_p_by_extension().map_err(|e| Failure::usage(e.to_string()))?;
            let mut within = true;
            let mut max_log2 = 0f64;
            for (m, p) in &heights {
                let l = log2_big(p);
                max_log2 = max_log2.max(l);
                if !growth_bound(&params, &BigUint::from(*m), &cfg).log2_at_least(l) {
                    within = false;
                }
            }
            Some(TraceCheck {
                steps_checked: heights.len(),
                max_log2_p: max_log2,
                within_bound: within,
            })
        }
        None => None,
    };
    let generators = t.generator_count();
    let report = BoundsReport {
        format: FORMAT_VERSION,
        kind: "bounds".into(),
        sos_type: t.into(),
        mode: mode.name().into(),
        bit_cap: a.bit_cap,
        variables: t.nvars(),
        generators,
        dube_degree: BoundJson::from_value(&params.dube_degree().to_bound(&cfg)),
        q: BoundJson::from_value(&params.q().to_bound(&cfg)),
        step_bound: BoundJson::from_value(&buchberger_step_bound(&params, &cfg)),
        charp_threshold: BoundJson::from_value(&charp_threshold(&params, &cfg)),
        field_degree: BoundJson::from_value(&field_degree_bound(t, &cfg)),
        bombieri: BoundJson::from_value(&BoundValue::Exact(bombieri_bound(2, t.nvars() as u64, generators as u64))),
        trace_check,
    };
    let within = report.trace_check.as_ref().is_none_or(|c| c.within_bound);
    emit(&to_pretty(&report), a.out.as_deref())?;
    if !within {
        return Err(Failure::inconsistent("observed coefficient growth exceeds the bound"));
    }
    Ok(EXIT_OK)
}

fn cmd_verify(path: &Path, p: Option<u64>) -> Outcome {
    let doc = FormulaJson::parse(&read(path)?).map_err(|e| Failure::usage(e.to_string()))?;
    let mut f = doc.to_formula().map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(p) = p {
        match f.field() {
            Field::Rational => f = reduce_formula_mod_p(&f, p).map_err(|e| Failure::usage(e.to_string()))?,
            other if other.characteristic() == p => {}
            other => return Err(Failure::usage(format!("formula is over {other}, not reducible mod {p}"))),
        }
    }
    let ok = verify_formula(&f).map_err(|e| Failure::inconsistent(e.to_string()))?;
    println!("{}", if ok { "valid" } else { "invalid" });
    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_catalog(n: usize, p: Option<u64>, out: Option<&Path>) -> Outcome {
    let field = match p {
        Some(p) => finite_field(p, 1)?,
        None => Field::Rational,
    };
    let f = catalog(n, &field).map_err(|e| Failure::usage(e.to_string()))?;
    emit(&to_pretty(&FormulaJson::from_formula(&f)), out)?;
    Ok(EXIT_OK)
}
