//! Exhaustive and backtracking search for explicit formulas over small finite fields.
//!
//! Both strategies visit coefficient tensors in the same order: the tensor is
//! read as `rs` column vectors `v_jk in F^n` placed in `(j, k)` lexicographic
//! order, and each vector is enumerated by its index with the first coordinate
//! most significant. Backtracking only prunes, so on complete runs both
//! strategies return identical lists.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::fields::{Field, FieldElement};
use crate::sos::{gen_sos_ideal, verify_formula, SosError, SosFormula, SosType};

/// Largest field order handled by the index tables.
pub const MAX_FIELD_ORDER: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search needs a finite field")]
    InfiniteField,
    #[error("field order {0} exceeds the search limit of {MAX_FIELD_ORDER}")]
    FieldTooLarge(u64),
    #[error("vector space F^{n} over a field of order {q} is too large to index")]
    VectorSpaceTooLarge { q: u64, n: usize },
    #[error("emitted formula failed verification")]
    Unsound,
    #[error(transparent)]
    Sos(#[from] SosError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Backtracking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    First,
    All,
    Count,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub sos_type: SosType,
    pub field: Field,
    pub strategy: Strategy,
    pub node_budget: Option<u64>,
    /// Soft cap, checked every few thousand nodes.
    pub time_budget: Option<Duration>,
    pub emit: Emit,
    /// Split the backtracking tree by the first vector and search branches on
    /// the rayon pool. Results and node counts match the sequential run.
    pub parallel: bool,
}

impl SearchConfig {
    pub fn new(sos_type: SosType, field: Field) -> Self {
        SearchConfig {
            sos_type,
            field,
            strategy: Strategy::Backtracking,
            node_budget: None,
            time_budget: None,
            emit: Emit::All,
            parallel: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Found,
    ExhaustedNone,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub formulas: Vec<SosFormula>,
    /// Number of formulas found (also filled when `emit` is `Count`).
    pub count: u64,
    pub nodes: u64,
}

/// Addition and multiplication tables over element indices.
pub struct FieldTables {
    pub q: usize,
    elements: Vec<FieldElement>,
    add: Vec<u16>,
    mul: Vec<u16>,
    one: u16,
}

impl FieldTables {
    pub fn new(field: &Field) -> Result<Self, SearchError> {
        let order = field.order().ok_or(SearchError::InfiniteField)?;
        if order > MAX_FIELD_ORDER {
            return Err(SearchError::FieldTooLarge(order));
        }
        let elements = field.enumerate().ok_or(SearchError::InfiniteField)?;
        let q = elements.len();
        let idx = |e: &FieldElement| e.index().expect("finite field element") as u16;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for (a, ea) in elements.iter().enumerate() {
            for (b, eb) in elements.iter().enumerate() {
                add[a * q + b] = idx(&ea.try_add(eb).expect("same field"));
                mul[a * q + b] = idx(&ea.try_mul(eb).expect("same field"));
            }
        }
        let one = idx(&field.one());
        Ok(FieldTables {
            q,
            elements,
            add,
            mul,
            one,
        })
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn element(&self, a: u16) -> &FieldElement {
        &self.elements[a as usize]
    }

    fn neg_one(&self) -> u16 {
        (0..self.q as u16).find(|&x| self.add(x, self.one) == 0).unwrap()
    }
}

struct Space<'a> {
    t: SosType,
    tables: &'a FieldTables,
    /// `q^n`
    vectors: u64,
}

impl<'a> Space<'a> {
    fn new(t: SosType, tables: &'a FieldTables) -> Result<Self, SearchError> {
        let q = tables.q as u64;
        let vectors = u32::try_from(t.n)
            .ok()
            .and_then(|n| q.checked_pow(n))
            .ok_or(SearchError::VectorSpaceTooLarge { q, n: t.n })?;
        Ok(Space { t, tables, vectors })
    }

    fn decode(&self, mut idx: u64, out: &mut [u16]) {
        let q = self.tables.q as u64;
        for slot in out.iter_mut().rev() {
            *slot = (idx % q) as u16;
            idx /= q;
        }
    }

    fn dot(&self, a: &[u16], b: &[u16]) -> u16 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.tables.add(acc, self.tables.mul(x, y)))
    }

    /// Constraints closed by placing `v` at position `pos` given positions `0..pos`.
    fn placement_ok(&self, placed: &[u16], pos: usize, v: &[u16]) -> bool {
        let (n, s) = (self.t.n, self.t.s);
        let at = |p: usize| &placed[p * n..(p + 1) * n];
        let (j, k) = (pos / s, pos % s);
        if self.dot(v, v) != self.tables.one {
            return false;
        }
        for k1 in 0..k {
            if self.dot(at(j * s + k1), v) != 0 {
                return false;
            }
        }
        for j1 in 0..j {
            if self.dot(at(j1 * s + k), v) != 0 {
                return false;
            }
            for k1 in 0..k {
                let a = self.dot(at(j1 * s + k1), v);
                let b = self.dot(at(j1 * s + k), at(j * s + k1));
                if self.tables.add(a, b) != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Vector-major layout (`placed[pos * n + i]`) to a formula.
    fn to_formula(&self, placed: &[u16]) -> Result<SosFormula, SearchError> {
        let (n, rs) = (self.t.n, self.t.r * self.t.s);
        let mut alpha = Vec::with_capacity(n * rs);
        for i in 0..n {
            for pos in 0..rs {
                alpha.push(self.tables.element(placed[pos * n + i]).clone());
            }
        }
        let field = self.tables.element(0).field();
        Ok(SosFormula::new(self.t, field, alpha)?)
    }
}

/// The vector constraints of the backtracking search, evaluated on a full tensor.
pub fn satisfies_vector_constraints(f: &SosFormula) -> Result<bool, SearchError> {
    let tables = FieldTables::new(f.field())?;
    let space = Space::new(f.sos_type(), &tables)?;
    let t = f.sos_type();
    let rs = t.r * t.s;
    let mut placed = vec![0u16; rs * t.n];
    for pos in 0..rs {
        for i in 0..t.n {
            placed[pos * t.n + i] = f.alpha()[i * rs + pos].index().unwrap() as u16;
        }
    }
    Ok((0..rs).all(|pos| space.placement_ok(&placed, pos, &placed[pos * t.n..(pos + 1) * t.n])))
}

struct Budget {
    nodes: u64,
    limit: Option<u64>,
    deadline: Option<Instant>,
    exceeded: bool,
}

impl Budget {
    fn new(limit: Option<u64>, time: Option<Duration>) -> Self {
        Budget {
            nodes: 0,
            limit,
            deadline: time.map(|d| Instant::now() + d),
            exceeded: false,
        }
    }

    /// Counts one node; `false` when the budget does not allow it.
    fn visit(&mut self) -> bool {
        if self.limit.is_some_and(|l| self.nodes >= l) {
            self.exceeded = true;
            return false;
        }
        if self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() > d) {
            self.exceeded = true;
            return false;
        }
        self.nodes += 1;
        true
    }
}

/// Solutions in visiting order, each stamped with the node count at which it was completed.
struct Found {
    tensors: Vec<Vec<u16>>,
    stamps: Vec<u64>,
    keep: bool,
}

impl Found {
    fn push(&mut self, placed: &[u16], stamp: u64) {
        if self.keep {
            self.tensors.push(placed.to_vec());
        }
        self.stamps.push(stamp);
    }
}

struct Dfs<'a> {
    space: &'a Space<'a>,
    placed: Vec<u16>,
    budget: Budget,
    found: Found,
    first_only: bool,
}

impl Dfs<'_> {
    /// Returns `false` to stop the whole search.
    fn go(&mut self, pos: usize, candidates: std::ops::Range<u64>) -> bool {
        let n = self.space.t.n;
        let rs = self.space.t.r * self.space.t.s;
        let mut v = vec![0u16; n];
        for idx in candidates {
            if !self.budget.visit() {
                return false;
            }
            self.space.decode(idx, &mut v);
            if !self.space.placement_ok(&self.placed, pos, &v) {
                continue;
            }
            self.placed[pos * n..(pos + 1) * n].copy_from_slice(&v);
            if pos + 1 == rs {
                self.found.push(&self.placed, self.budget.nodes);
                if self.first_only {
                    return false;
                }
            } else if !self.go(pos + 1, 0..self.space.vectors) {
                return false;
            }
        }
        true
    }
}

struct Partial {
    found: Found,
    nodes: u64,
    exceeded: bool,
}

fn run_backtracking(space: &Space, cfg: &SearchConfig, roots: std::ops::Range<u64>) -> Partial {
    let rs = space.t.r * space.t.s;
    let mut dfs = Dfs {
        space,
        placed: vec![0; rs * space.t.n],
        budget: Budget::new(cfg.node_budget, cfg.time_budget),
        found: Found {
            tensors: Vec::new(),
            stamps: Vec::new(),
            keep: cfg.emit != Emit::Count,
        },
        first_only: cfg.emit == Emit::First,
    };
    dfs.go(0, roots);
    Partial {
        nodes: dfs.budget.nodes,
        exceeded: dfs.budget.exceeded,
        found: dfs.found,
    }
}

/// Merges per-branch runs as if the branches had been searched one after another.
fn merge_branches(branches: Vec<Partial>, cfg: &SearchConfig) -> Partial {
    let limit = cfg.node_budget.unwrap_or(u64::MAX);
    let mut out = Partial {
        found: Found {
            tensors: Vec::new(),
            stamps: Vec::new(),
            keep: cfg.emit != Emit::Count,
        },
        nodes: 0,
        exceeded: false,
    };
    for b in branches {
        let prefix = out.nodes;
        let mut tensors = b.found.tensors.into_iter();
        for stamp in b.found.stamps {
            let global = prefix + stamp;
            if global > limit {
                break;
            }
            if out.found.keep {
                out.found.tensors.push(tensors.next().unwrap());
            }
            out.found.stamps.push(global);
            if cfg.emit == Emit::First {
                out.nodes = global;
                return out;
            }
        }
        if b.exceeded || prefix + b.nodes > limit {
            out.nodes = limit.min(prefix + b.nodes);
            out.exceeded = true;
            return out;
        }
        out.nodes = prefix + b.nodes;
    }
    out
}

fn finish(space: &Space, cfg: &SearchConfig, partial: Partial) -> Result<SearchOutcome, SearchError> {
    let mut formulas = Vec::with_capacity(partial.found.tensors.len());
    for tensor in &partial.found.tensors {
        let f = space.to_formula(tensor)?;
        if !verify_formula(&f)? {
            return Err(SearchError::Unsound);
        }
        formulas.push(f);
    }
    let count = partial.found.stamps.len() as u64;
    let status = if partial.exceeded && !(cfg.emit == Emit::First && count > 0) {
        SearchStatus::BudgetExceeded
    } else if count > 0 {
        SearchStatus::Found
    } else {
        SearchStatus::ExhaustedNone
    };
    Ok(SearchOutcome {
        status,
        formulas,
        count,
        nodes: partial.nodes,
    })
}

/// Backtracking over column vectors, pruning as soon as a constraint among
/// the placed vectors fails.
pub fn search_backtracking(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let tables = FieldTables::new(&cfg.field)?;
    let space = Space::new(cfg.sos_type, &tables)?;
    let partial = if cfg.parallel {
        let branches: Vec<Partial> = (0..space.vectors)
            .into_par_iter()
            .map(|root| run_backtracking(&space, cfg, root..root + 1))
            .collect();
        merge_branches(branches, cfg)
    } else {
        run_backtracking(&space, cfg, 0..space.vectors)
    };
    finish(&space, cfg, partial)
}

/// Every tensor in order, kept when all ideal generators vanish at it.
pub fn search_naive(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let tables = FieldTables::new(&cfg.field)?;
    let space = Space::new(cfg.sos_type, &tables)?;
    let t = cfg.sos_type;
    let (n, rs) = (t.n, t.r * t.s);
    let neg_one = tables.neg_one();

    // Generators as (products of flat variable pairs, constant term).
    let spec = gen_sos_ideal(t);
    let gens: Vec<(Vec<(usize, usize)>, bool)> = spec
        .generators
        .iter()
        .map(|g| {
            let mut prods = Vec::new();
            let mut constant = false;
            for term in g.terms() {
                let vars: Vec<usize> = term
                    .mono
                    .exps()
                    .iter()
                    .enumerate()
                    .flat_map(|(v, &e)| std::iter::repeat_n(v, e as usize))
                    .collect();
                match vars.as_slice() {
                    [a, b] => prods.push((*a, *b)),
                    [] => constant = true,
                    _ => unreachable!("generators are quadratic"),
                }
            }
            (prods, constant)
        })
        .collect();

    let mut budget = Budget::new(cfg.node_budget, cfg.time_budget);
    let mut found = Found {
        tensors: Vec::new(),
        stamps: Vec::new(),
        keep: cfg.emit != Emit::Count,
    };
    let mut digits = vec![0u64; rs];
    let mut placed = vec![0u16; rs * n];
    let mut flat = vec![0u16; rs * n];
    'outer: loop {
        if !budget.visit() {
            break;
        }
        for (pos, &d) in digits.iter().enumerate() {
            space.decode(d, &mut placed[pos * n..(pos + 1) * n]);
        }
        for i in 0..n {
            for pos in 0..rs {
                flat[i * rs + pos] = placed[pos * n + i];
            }
        }
        let ok = gens.iter().all(|(prods, constant)| {
            let mut acc = if *constant { neg_one } else { 0 };
            for &(a, b) in prods {
                acc = tables.add(acc, tables.mul(flat[a], flat[b]));
            }
            acc == 0
        });
        if ok {
            found.push(&placed, budget.nodes);
            if cfg.emit == Emit::First {
                break;
            }
        }
        for pos in (0..rs).rev() {
            digits[pos] += 1;
            if digits[pos] < space.vectors {
                continue 'outer;
            }
            digits[pos] = 0;
        }
        break;
    }
    let partial = Partial {
        nodes: budget.nodes,
        exceeded: budget.exceeded,
        found,
    };
    finish(&space, cfg, partial)
}

pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    match cfg.strategy {
        Strategy::Naive => search_naive(cfg),
        Strategy::Backtracking => search_backtracking(cfg),
    }
}
