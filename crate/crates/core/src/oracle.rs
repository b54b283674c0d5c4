//! Direct evaluation of the bounded semantics on concrete traces, and an
//! exhaustive search over small instances.
//!
//! Nothing here goes through the constraint encoding: truth values are
//! computed from the semantic clauses themselves, which makes this module
//! the reference the encoder and solver backend are tested against.
//!
//! Positions range over `0..=k`. On a looping trace the successor of `k` is
//! the loop position; future operators walk that successor relation until a
//! position repeats. Past operators look back along the real indices. On an
//! acyclic trace `X` is false at `k`, until needs its witness inside the
//! path, and release needs a position where the left side holds while the
//! right side held throughout.
//!
//! A looping trace also has to close consistently: the appended instant
//! `k + 1` stands for the loop position, so every past subformula computed
//! at `k + 1` from the history ending at `k` must agree with its value at
//! the loop position. [`loop_closes`] checks that side condition.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::formula::{analyze, subformulas, Atom, DlPrim, Formula, Term};
pub use crate::trace::LoopShape;
use crate::trace::{Trace, TraceError, VarValues};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("instant {instant} outside 0..={k}")]
    InstantOutOfRange { instant: usize, k: usize },
    #[error("trace has no value for `{var}` at instant {instant}")]
    MissingVar { var: String, instant: i64 },
    #[error("trace has no proposition `{0}`")]
    MissingProp(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Three-valued truth: `None` is unknown.
type Tri = Option<bool>;

fn and3(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

fn not3(a: Tri) -> Tri {
    a.map(|v| !v)
}

fn eq3(a: Tri, b: Tri) -> Tri {
    Some(a? == b?)
}

/// Read access to a possibly partial valuation.
trait Valuation {
    fn k(&self) -> usize;
    fn loop_at(&self) -> usize;
    fn prop(&self, name: &str, instant: usize) -> Result<Tri, EvalError>;
    fn var(&self, name: &str, instant: i64) -> Result<Option<i64>, EvalError>;
}

impl Valuation for Trace {
    fn k(&self) -> usize {
        self.k
    }

    fn loop_at(&self) -> usize {
        self.loop_at
    }

    fn prop(&self, name: &str, instant: usize) -> Result<Tri, EvalError> {
        Trace::prop(self, name, instant).map(Some).ok_or_else(|| EvalError::MissingProp(name.to_string()))
    }

    fn var(&self, name: &str, instant: i64) -> Result<Option<i64>, EvalError> {
        Trace::var(self, name, instant)
            .map(Some)
            .ok_or_else(|| EvalError::MissingVar { var: name.to_string(), instant })
    }
}

/// Truth values of every subformula at every position.
struct Table<'f> {
    index: HashMap<&'f Formula, usize>,
    values: Vec<Vec<Tri>>,
}

impl<'f> Table<'f> {
    fn at(&self, f: &Formula, i: usize) -> Tri {
        self.values[self.index[f]][i]
    }

    fn row(&self, f: &Formula) -> &[Tri] {
        &self.values[self.index[f]]
    }
}

/// Positions visited from `i` following the successor relation, each once.
fn future_path(i: usize, k: usize, loop_at: usize) -> Vec<usize> {
    let mut path: Vec<usize> = (i..=k).collect();
    if loop_at >= 1 && i > loop_at {
        path.extend(loop_at..i);
    }
    path
}

fn term_value(v: &impl Valuation, t: &Term, i: usize) -> Result<Option<i64>, EvalError> {
    if t.is_zero() {
        return Ok(Some(0));
    }
    v.var(&t.var, i as i64 + i64::from(t.offset))
}

fn prim_value(v: &impl Valuation, p: &DlPrim, i: usize) -> Result<Tri, EvalError> {
    Ok(match p {
        DlPrim::Less(l, r, d) => match (term_value(v, l, i)?, term_value(v, r, i)?) {
            (Some(a), Some(b)) => Some(a < b + d),
            _ => None,
        },
        DlPrim::Equal(l, r) => match (term_value(v, l, i)?, term_value(v, r, i)?) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        },
        DlPrim::Not(a) => not3(prim_value(v, a, i)?),
        DlPrim::And(a, b) => and3(prim_value(v, a, i)?, prim_value(v, b, i)?),
        DlPrim::Or(a, b) => or3(prim_value(v, a, i)?, prim_value(v, b, i)?),
    })
}

fn atom_value(v: &impl Valuation, a: &Atom, i: usize) -> Result<Tri, EvalError> {
    prim_value(v, &a.desugar(), i)
}

#[allow(clippy::manual_try_fold)] // `None` is "unknown", not a failure to short-circuit on
fn build_table<'f>(f: &'f Formula, v: &impl Valuation) -> Result<Table<'f>, EvalError> {
    let subs = subformulas(f);
    let (k, l) = (v.k(), v.loop_at());
    let mut table = Table { index: HashMap::with_capacity(subs.len()), values: Vec::with_capacity(subs.len()) };
    for s in subs {
        let mut row = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let val = match s {
                Formula::True => Some(true),
                Formula::False => Some(false),
                Formula::Prop(p) => v.prop(p, i)?,
                Formula::Atom(a) => atom_value(v, a, i)?,
                Formula::Not(a) => not3(table.at(a, i)),
                Formula::And(a, b) => and3(table.at(a, i), table.at(b, i)),
                Formula::Or(a, b) => or3(table.at(a, i), table.at(b, i)),
                Formula::Next(a) => {
                    if i < k {
                        table.at(a, i + 1)
                    } else if l >= 1 {
                        table.at(a, l)
                    } else {
                        Some(false)
                    }
                }
                Formula::Yesterday(a) => {
                    if i == 0 {
                        Some(false)
                    } else {
                        table.at(a, i - 1)
                    }
                }
                Formula::WeakYesterday(a) => {
                    if i == 0 {
                        Some(true)
                    } else {
                        table.at(a, i - 1)
                    }
                }
                Formula::Until(a, b) => {
                    // exists n on the path: b at n and a at every earlier step
                    let (ra, rb) = (table.row(a), table.row(b));
                    let mut found = Some(false);
                    let mut prefix = Some(true);
                    for p in future_path(i, k, l) {
                        found = or3(found, and3(prefix, rb[p]));
                        prefix = and3(prefix, ra[p]);
                    }
                    found
                }
                Formula::Release(a, b) => {
                    let (ra, rb) = (table.row(a), table.row(b));
                    if l >= 1 {
                        // every n on the path: b at n, or a at some earlier step
                        let mut all = Some(true);
                        let mut released = Some(false);
                        for p in future_path(i, k, l) {
                            all = and3(all, or3(released, rb[p]));
                            released = or3(released, ra[p]);
                        }
                        all
                    } else {
                        // exists j in [i, k]: a at j and b throughout [i, j]
                        let mut found = Some(false);
                        let mut held = Some(true);
                        for j in i..=k {
                            held = and3(held, rb[j]);
                            found = or3(found, and3(held, ra[j]));
                        }
                        found
                    }
                }
                Formula::Since(a, b) => {
                    // exists j <= i: b at j and a on (j, i]
                    let (ra, rb) = (table.row(a), table.row(b));
                    let mut found = Some(false);
                    for (j, &bj) in rb.iter().enumerate().take(i + 1) {
                        let held = ra[j + 1..=i].iter().fold(Some(true), |acc, &v| and3(acc, v));
                        found = or3(found, and3(bj, held));
                    }
                    found
                }
                Formula::Trigger(a, b) => {
                    // every j <= i: b at j, or a somewhere on (j, i]
                    let (ra, rb) = (table.row(a), table.row(b));
                    let mut all = Some(true);
                    for (j, &bj) in rb.iter().enumerate().take(i + 1) {
                        let freed = ra[j + 1..=i].iter().fold(Some(false), |acc, &v| or3(acc, v));
                        all = and3(all, or3(bj, freed));
                    }
                    all
                }
            };
            row.push(val);
        }
        table.index.insert(s, table.values.len());
        table.values.push(row);
    }
    Ok(table)
}

/// Consistency of past subformulas at the appended instant `k + 1` with the
/// loop position. Always true on acyclic traces.
fn closure_value(f: &Formula, table: &Table, k: usize, l: usize) -> Tri {
    if l == 0 {
        return Some(true);
    }
    let mut ok = Some(true);
    for s in subformulas(f) {
        let at_tail = match s {
            Formula::Yesterday(a) | Formula::WeakYesterday(a) => table.at(a, k),
            Formula::Since(a, b) => or3(table.at(b, l), and3(table.at(a, l), table.at(s, k))),
            Formula::Trigger(a, b) => and3(table.at(b, l), or3(table.at(a, l), table.at(s, k))),
            _ => continue,
        };
        ok = and3(ok, eq3(at_tail, table.at(s, l)));
    }
    ok
}

/// Truth of `f` at `instant` of `trace`.
pub fn eval(f: &Formula, trace: &Trace, instant: usize) -> Result<bool, EvalError> {
    Ok(eval_all(f, trace)?[check_instant(trace, instant)?])
}

/// Truth of `f` at every instant `0..=k`.
pub fn eval_all(f: &Formula, trace: &Trace) -> Result<Vec<bool>, EvalError> {
    let table = build_table(f, trace)?;
    Ok(table.row(f).iter().map(|v| v.expect("concrete trace")).collect())
}

fn check_instant(trace: &Trace, instant: usize) -> Result<usize, EvalError> {
    if instant > trace.k {
        return Err(EvalError::InstantOutOfRange { instant, k: trace.k });
    }
    Ok(instant)
}

/// Whether a looping trace closes consistently for the past subformulas of `f`.
pub fn loop_closes(f: &Formula, trace: &Trace) -> Result<bool, EvalError> {
    let table = build_table(f, trace)?;
    Ok(closure_value(f, &table, trace.k, trace.loop_at).expect("concrete trace"))
}

/// `trace` is a well-formed model of `f` at instant 0.
pub fn satisfies(f: &Formula, trace: &Trace) -> Result<bool, EvalError> {
    trace.validate()?;
    let table = build_table(f, trace)?;
    let root = table.at(f, 0).expect("concrete trace");
    let closes = closure_value(f, &table, trace.k, trace.loop_at).expect("concrete trace");
    Ok(root && closes)
}

#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    /// Upper bound on the number of enumerated cells: one per proposition
    /// and instant in `0..=k`, one per variable and instant of its window.
    pub budget: usize,
    pub shape: LoopShape,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { budget: 64, shape: LoopShape::Any }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    Sat(Trace),
    UnsatWithinRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("instance has {cells} cells, budget is {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
    #[error("empty integer range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Exhaustive search for a model of `f` with bound `k` and every integer
/// value in `[lo, hi]`.
///
/// Candidates are visited in a fixed order: loop position ascending; then
/// the propositional valuation read as a binary counter whose least
/// significant bit is the first `(proposition, instant)` pair in
/// lexicographic order; then integer values as a tuple ordered by
/// `(instant, variable)`, compared lexicographically. The first model in
/// that order is returned. Branches whose outcome is already decided under
/// three-valued evaluation are cut, which leaves the order intact.
pub fn enumerate(f: &Formula, k: usize, lo: i64, hi: i64, cfg: EnumConfig) -> Result<Enumeration, EnumError> {
    if k == 0 {
        return Err(EnumError::ZeroBound);
    }
    if lo > hi {
        return Err(EnumError::EmptyRange { lo, hi });
    }
    let info = analyze(f);
    let props: Vec<String> = info.propositions.into_iter().collect();
    let vars: Vec<String> = info.variables.into_iter().collect();
    let start = i64::from(info.min_depth);
    let window = (k as i64 + i64::from(info.max_depth) - start + 1) as usize;
    let cells = props.len() * (k + 1) + vars.len() * window;
    if cells > cfg.budget {
        return Err(EnumError::BudgetExceeded { cells, budget: cfg.budget });
    }
    let mut search = Search::new(f, k, lo, hi, props, vars, start, window);
    for l in cfg.shape.loops(k) {
        search.reset(l);
        let last = search.prop_vals.len();
        if search.props_dfs(last)? {
            return Ok(Enumeration::Sat(search.witness()));
        }
    }
    Ok(Enumeration::UnsatWithinRange)
}

/// A difference-logic atom instantiated at one position.
struct Instance<'f> {
    atom: &'f Atom,
    pos: usize,
    /// Order index of the last point it reads; `None` for ground atoms.
    ready_after: Option<usize>,
}

struct Search<'f> {
    f: &'f Formula,
    k: usize,
    loop_at: usize,
    lo: i64,
    hi: i64,
    props: Vec<String>,
    vars: Vec<String>,
    start: i64,
    window: usize,
    /// Indexed by `prop * (k + 1) + instant`.
    prop_vals: Vec<Option<bool>>,
    /// Indexed by `(instant - start) * vars.len() + var`.
    int_vals: Vec<Option<i64>>,
    instances: Vec<Instance<'f>>,
    /// Per number of assigned points: (decided instances, live points).
    frontier: Vec<(Vec<usize>, Vec<usize>)>,
    failed: HashSet<(usize, Vec<bool>, Vec<i64>)>,
}

impl<'f> Valuation for Search<'f> {
    fn k(&self) -> usize {
        self.k
    }

    fn loop_at(&self) -> usize {
        self.loop_at
    }

    fn prop(&self, name: &str, instant: usize) -> Result<Tri, EvalError> {
        let p = self.props.iter().position(|q| q == name).ok_or_else(|| EvalError::MissingProp(name.into()))?;
        Ok(self.prop_vals[p * (self.k + 1) + instant])
    }

    fn var(&self, name: &str, instant: i64) -> Result<Option<i64>, EvalError> {
        let missing = || EvalError::MissingVar { var: name.into(), instant };
        let v = self.vars.iter().position(|x| x == name).ok_or_else(missing)?;
        let t = usize::try_from(instant - self.start).ok().filter(|&t| t < self.window).ok_or_else(missing)?;
        Ok(self.int_vals[t * self.vars.len() + v])
    }
}

impl<'f> Search<'f> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        f: &'f Formula,
        k: usize,
        lo: i64,
        hi: i64,
        props: Vec<String>,
        vars: Vec<String>,
        start: i64,
        window: usize,
    ) -> Self {
        let nv = vars.len();
        let point = |t: &Term, pos: usize| -> Option<usize> {
            if t.is_zero() {
                return None;
            }
            let v = vars.iter().position(|x| *x == t.var).expect("variable collected from formula");
            let rel = pos as i64 + i64::from(t.offset) - start;
            Some(rel as usize * nv + v)
        };
        let mut atoms: Vec<&Atom> = f.atoms();
        atoms.sort();
        atoms.dedup();
        let mut instances = Vec::new();
        for atom in atoms {
            for pos in 0..=k {
                let ready_after = atom.terms().into_iter().filter_map(|t| point(t, pos)).max();
                instances.push(Instance { atom, pos, ready_after });
            }
        }
        let points = window * nv;
        let mut frontier = Vec::with_capacity(points + 1);
        for assigned in 0..=points {
            let decided =
                (0..instances.len()).filter(|&i| instances[i].ready_after.is_none_or(|r| r < assigned)).collect();
            let mut live: Vec<usize> = instances
                .iter()
                .filter(|inst| inst.ready_after.is_some_and(|r| r >= assigned))
                .flat_map(|inst| inst.atom.terms().into_iter().map(|t| point(t, inst.pos)))
                .flatten()
                .filter(|&p| p < assigned)
                .collect();
            live.sort_unstable();
            live.dedup();
            frontier.push((decided, live));
        }
        Search {
            f,
            k,
            loop_at: 0,
            lo,
            hi,
            prop_vals: vec![None; props.len() * (k + 1)],
            int_vals: vec![None; points],
            props,
            vars,
            start,
            window,
            instances,
            frontier,
            failed: HashSet::new(),
        }
    }

    fn reset(&mut self, loop_at: usize) {
        self.loop_at = loop_at;
        self.prop_vals.iter_mut().for_each(|v| *v = None);
        self.int_vals.iter_mut().for_each(|v| *v = None);
    }

    fn status(&self) -> Result<Tri, EvalError> {
        let table = build_table(self.f, self)?;
        Ok(and3(table.at(self.f, 0), closure_value(self.f, &table, self.k, self.loop_at)))
    }

    fn labels_agree(&self) -> bool {
        if self.loop_at == 0 {
            return true;
        }
        (0..self.props.len()).all(|p| {
            let base = p * (self.k + 1);
            match (self.prop_vals[base + self.loop_at - 1], self.prop_vals[base + self.k]) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            }
        })
    }

    /// Bits `0..remaining` are unassigned; the highest is assigned first so
    /// that the visiting order is the counter order.
    fn props_dfs(&mut self, remaining: usize) -> Result<bool, EvalError> {
        if !self.labels_agree() || self.status()? == Some(false) {
            return Ok(false);
        }
        if remaining == 0 {
            self.failed.clear();
            return self.ints_dfs(0);
        }
        let bit = remaining - 1;
        for value in [false, true] {
            self.prop_vals[bit] = Some(value);
            if self.props_dfs(bit)? {
                return Ok(true);
            }
        }
        self.prop_vals[bit] = None;
        Ok(false)
    }

    fn ints_dfs(&mut self, assigned: usize) -> Result<bool, EvalError> {
        match self.status()? {
            Some(false) => return Ok(false),
            Some(true) => {
                for v in &mut self.int_vals[assigned..] {
                    *v = Some(self.lo);
                }
                return Ok(true);
            }
            None => {}
        }
        if assigned == self.int_vals.len() {
            return Ok(false);
        }
        let key = self.memo_key(assigned)?;
        if self.failed.contains(&key) {
            return Ok(false);
        }
        for value in self.lo..=self.hi {
            self.int_vals[assigned] = Some(value);
            if self.ints_dfs(assigned + 1)? {
                return Ok(true);
            }
        }
        self.int_vals[assigned] = None;
        self.failed.insert(key);
        Ok(false)
    }

    fn memo_key(&self, assigned: usize) -> Result<(usize, Vec<bool>, Vec<i64>), EvalError> {
        let (decided, live) = &self.frontier[assigned];
        let mut bits = Vec::with_capacity(decided.len());
        for &i in decided {
            let inst = &self.instances[i];
            bits.push(atom_value(self, inst.atom, inst.pos)?.expect("decided instance"));
        }
        let values = live.iter().map(|&p| self.int_vals[p].expect("assigned point")).collect();
        Ok((assigned, bits, values))
    }

    fn witness(&self) -> Trace {
        let mut t = Trace::new(self.k, self.loop_at);
        for (p, name) in self.props.iter().enumerate() {
            let base = p * (self.k + 1);
            let vals: Vec<bool> = (0..=self.k).map(|i| self.prop_vals[base + i].unwrap_or(false)).collect();
            t = t.with_prop(name.clone(), &vals);
        }
        let nv = self.vars.len();
        for (v, name) in self.vars.iter().enumerate() {
            let values = (0..self.window).map(|t| self.int_vals[t * nv + v].unwrap_or(self.lo)).collect();
            t.vars.insert(name.clone(), VarValues { start: self.start, values });
        }
        t
    }
}
