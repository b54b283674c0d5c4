//! Compilation of a PNF formula and a bound into a first-order constraint
//! system over uninterpreted unary predicates and integer functions.
//!
//! Every subformula gets a predicate `P<idx>` (post-order index) over the
//! instants `0..=k+1`; every arithmetic temporal term gets a function
//! `F<var>_o<offset>`; the integer constant `loop` selects the loop
//! position (0 meaning acyclic), and every until/release node gets a
//! witness constant `J<idx>`.
//!
//! The extra instant `k + 1` stands for the successor of `k`. It only ever
//! carries subformula truth values: arithmetic is never evaluated there and
//! no assertion relates `loop` to a variable, so integer valuations are not
//! forced to be periodic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{analyze, subformulas, DlPrim, Formula, Rel, Term};
use crate::trace::LoopShape;

pub const LOOP: &str = "loop";

/// Integer-valued expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Lit(i64),
    Const(String),
    App(String, Box<IntExpr>),
    /// `e + c`
    Add(Box<IntExpr>, i64),
}

impl IntExpr {
    pub fn lit(v: i64) -> Self {
        IntExpr::Lit(v)
    }

    pub fn constant(name: impl Into<String>) -> Self {
        IntExpr::Const(name.into())
    }

    pub fn app(fun: impl Into<String>, arg: IntExpr) -> Self {
        IntExpr::App(fun.into(), Box::new(arg))
    }

    pub fn plus(self, c: i64) -> Self {
        match self {
            _ if c == 0 => self,
            IntExpr::Lit(v) => IntExpr::Lit(v + c),
            IntExpr::Add(e, d) => IntExpr::Add(e, d + c).normalized(),
            e => IntExpr::Add(Box::new(e), c),
        }
    }

    fn normalized(self) -> Self {
        match self {
            IntExpr::Add(e, 0) => *e,
            e => e,
        }
    }
}

/// Boolean-valued assertions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    True,
    False,
    Pred(String, IntExpr),
    Cmp(IntExpr, Rel, IntExpr),
    Not(Box<Constraint>),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Implies(Box<Constraint>, Box<Constraint>),
    Iff(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    pub fn pred(name: &str, at: IntExpr) -> Self {
        Constraint::Pred(name.to_string(), at)
    }

    pub fn cmp(l: IntExpr, rel: Rel, r: IntExpr) -> Self {
        Constraint::Cmp(l, rel, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Constraint) -> Self {
        match c {
            Constraint::True => Constraint::False,
            Constraint::False => Constraint::True,
            Constraint::Not(inner) => *inner,
            c => Constraint::Not(Box::new(c)),
        }
    }

    pub fn and(items: Vec<Constraint>) -> Self {
        match items.len() {
            0 => Constraint::True,
            1 => items.into_iter().next().unwrap(),
            _ => Constraint::And(items),
        }
    }

    pub fn or(items: Vec<Constraint>) -> Self {
        match items.len() {
            0 => Constraint::False,
            1 => items.into_iter().next().unwrap(),
            _ => Constraint::Or(items),
        }
    }

    pub fn implies(a: Constraint, b: Constraint) -> Self {
        Constraint::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Constraint, b: Constraint) -> Self {
        Constraint::Iff(Box::new(a), Box::new(b))
    }

    fn visit<'a>(&'a self, on_int: &mut impl FnMut(&'a IntExpr), on_pred: &mut impl FnMut(&'a str, &'a IntExpr)) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Pred(p, e) => {
                on_pred(p, e);
                on_int(e);
            }
            Constraint::Cmp(l, _, r) => {
                on_int(l);
                on_int(r);
            }
            Constraint::Not(a) => a.visit(on_int, on_pred),
            Constraint::And(xs) | Constraint::Or(xs) => xs.iter().for_each(|x| x.visit(on_int, on_pred)),
            Constraint::Implies(a, b) | Constraint::Iff(a, b) => {
                a.visit(on_int, on_pred);
                b.visit(on_int, on_pred);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntFun {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

/// Declarations plus assertions; the order of every list is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSystem {
    pub int_consts: Vec<String>,
    pub int_funs: Vec<IntFun>,
    pub predicates: Vec<String>,
    /// Largest instant a predicate may be applied to.
    pub last_instant: i64,
    pub assertions: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllFormed {
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("`{name}` applied at {at}, outside [{lo}, {hi}]")]
    OutOfWindow { name: String, at: i64, lo: i64, hi: i64 },
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
}

fn ground(e: &IntExpr) -> Option<i64> {
    match e {
        IntExpr::Lit(v) => Some(*v),
        IntExpr::Add(e, c) => Some(ground(e)? + c),
        _ => None,
    }
}

impl ConstraintSystem {
    /// Checks that every symbol is declared once and that every application
    /// at a literal instant stays inside the symbol's window.
    pub fn check(&self) -> Result<(), IllFormed> {
        let mut seen = BTreeSet::new();
        let names = self.int_consts.iter().chain(self.int_funs.iter().map(|f| &f.name)).chain(&self.predicates);
        for n in names {
            if !seen.insert(n.as_str()) {
                return Err(IllFormed::Duplicate(n.clone()));
            }
        }
        let funs: BTreeMap<&str, (i64, i64)> = self.int_funs.iter().map(|f| (f.name.as_str(), (f.lo, f.hi))).collect();
        let consts: BTreeSet<&str> = self.int_consts.iter().map(String::as_str).collect();
        let preds: BTreeSet<&str> = self.predicates.iter().map(String::as_str).collect();
        let mut err = None;
        let mut check_int = |e: &IntExpr| check_int_expr(e, &funs, &consts, &mut err);
        let mut pred_err = None;
        let mut check_pred = |p: &str, e: &IntExpr| {
            if pred_err.is_some() {
                return;
            }
            if !preds.contains(p) {
                pred_err = Some(IllFormed::Undeclared(p.to_string()));
            } else if let Some(at) = ground(e) {
                if !(0..=self.last_instant).contains(&at) {
                    pred_err = Some(IllFormed::OutOfWindow { name: p.to_string(), at, lo: 0, hi: self.last_instant });
                }
            }
        };
        for a in &self.assertions {
            a.visit(&mut check_int, &mut check_pred);
        }
        match (err, pred_err) {
            (Some(e), _) | (None, Some(e)) => Err(e),
            (None, None) => Ok(()),
        }
    }
}

fn check_int_expr(
    e: &IntExpr,
    funs: &BTreeMap<&str, (i64, i64)>,
    consts: &BTreeSet<&str>,
    err: &mut Option<IllFormed>,
) {
    if err.is_some() {
        return;
    }
    match e {
        IntExpr::Lit(_) => {}
        IntExpr::Const(c) => {
            if !consts.contains(c.as_str()) {
                *err = Some(IllFormed::Undeclared(c.clone()));
            }
        }
        IntExpr::Add(e, _) => check_int_expr(e, funs, consts, err),
        IntExpr::App(f, arg) => {
            match funs.get(f.as_str()) {
                None => *err = Some(IllFormed::Undeclared(f.clone())),
                Some(&(lo, hi)) => {
                    if let Some(at) = ground(arg) {
                        if !(lo..=hi).contains(&at) {
                            *err = Some(IllFormed::OutOfWindow { name: f.clone(), at, lo, hi });
                        }
                    }
                }
            }
            check_int_expr(arg, funs, consts, err);
        }
    }
}

/// Names given to the symbols of an encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMeta {
    pub k: usize,
    pub predicate_of: BTreeMap<Formula, String>,
    pub fun_of: BTreeMap<Term, String>,
    pub loop_name: String,
    /// Keyed by the until/release subformula owning the witness.
    pub eventuality_names: BTreeMap<Formula, String>,
    /// Instants covered by the base variable functions.
    pub window: (i64, i64),
    pub variables: BTreeSet<String>,
    pub propositions: BTreeSet<String>,
}

impl EncodingMeta {
    /// Number of subformula predicates.
    pub fn m(&self) -> usize {
        self.predicate_of.len()
    }

    /// Number of until/release subformulas.
    pub fn n(&self) -> usize {
        self.eventuality_names.len()
    }

    pub fn prop_predicate(&self, p: &str) -> Option<&str> {
        self.predicate_of.get(&Formula::prop(p)).map(String::as_str)
    }

    pub fn base_fun(&self, var: &str) -> Option<&str> {
        self.fun_of.get(&Term::var(var)).map(String::as_str)
    }
}

/// Number of propositional variables a SAT-based encoding of the same
/// instance would introduce.
pub fn sat_baseline_count(k: usize, m: usize, n: usize) -> usize {
    (2 * k + 3) + (k + 2) * m + (k + 1) * n
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Values of variables at negative instants.
    pub init: BTreeMap<String, BTreeMap<i64, i64>>,
    /// Fixed labels over `0..=k`; pinned propositions are not free.
    pub labels: BTreeMap<String, Vec<bool>>,
    /// Every variable stays within `[lo, hi]` over its whole window.
    pub int_range: Option<(i64, i64)>,
    pub shape: LoopShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("formula is not in positive normal form")]
    NotPnf,
    #[error("labels for `{prop}` have {got} values, expected {expected}")]
    LabelLength { prop: String, got: usize, expected: usize },
    #[error("initial value for `{var}` at instant {at}, which is not a negative instant of its window")]
    InitOutOfWindow { var: String, at: i64 },
}

fn fun_name(t: &Term) -> String {
    format!("F{}_o{}", t.var, t.offset)
}

struct Ctx<'f> {
    k: i64,
    index: BTreeMap<&'f Formula, usize>,
    funs: BTreeMap<Term, String>,
}

impl<'f> Ctx<'f> {
    fn name(&self, f: &Formula) -> String {
        format!("P{}", self.index[f])
    }

    fn p(&self, f: &Formula, at: IntExpr) -> Constraint {
        Constraint::pred(&self.name(f), at)
    }

    fn pi(&self, f: &Formula, i: i64) -> Constraint {
        self.p(f, IntExpr::lit(i))
    }

    fn term(&self, t: &Term, i: i64) -> IntExpr {
        if t.is_zero() {
            return IntExpr::lit(0);
        }
        IntExpr::app(self.funs[t].clone(), IntExpr::lit(i))
    }

    fn prim(&self, p: &DlPrim, i: i64) -> Constraint {
        match p {
            DlPrim::Less(l, r, d) => Constraint::cmp(self.term(l, i), Rel::Lt, self.term(r, i).plus(*d)),
            DlPrim::Equal(l, r) => Constraint::cmp(self.term(l, i), Rel::Eq, self.term(r, i)),
            DlPrim::Not(a) => Constraint::not(self.prim(a, i)),
            DlPrim::And(a, b) => Constraint::and(vec![self.prim(a, i), self.prim(b, i)]),
            DlPrim::Or(a, b) => Constraint::or(vec![self.prim(a, i), self.prim(b, i)]),
        }
    }
}

fn loop_is(i: i64) -> Constraint {
    Constraint::cmp(IntExpr::constant(LOOP), Rel::Eq, IntExpr::lit(i))
}

fn has_loop() -> Constraint {
    Constraint::cmp(IntExpr::constant(LOOP), Rel::Ge, IntExpr::lit(1))
}

/// Range of `loop`, its shape restriction and the label equality between
/// the instant before the loop and `k`.
fn encode_time(
    props: &[&Formula],
    ctx_k: usize,
    name_of: impl Fn(&Formula) -> String,
    shape: LoopShape,
) -> Vec<Constraint> {
    let k = ctx_k as i64;
    let loop_c = || IntExpr::constant(LOOP);
    let mut out =
        vec![Constraint::cmp(loop_c(), Rel::Ge, IntExpr::lit(0)), Constraint::cmp(loop_c(), Rel::Le, IntExpr::lit(k))];
    match shape {
        LoopShape::Any => {}
        LoopShape::Acyclic => out.push(loop_is(0)),
        LoopShape::Lasso => out.push(has_loop()),
    }
    for p in props {
        let name = name_of(p);
        for i in 1..=k {
            out.push(Constraint::implies(
                loop_is(i),
                Constraint::iff(Constraint::pred(&name, IntExpr::lit(i - 1)), Constraint::pred(&name, IntExpr::lit(k))),
            ));
        }
    }
    out
}

fn encode_atts(ctx: &Ctx, opts: &EncodeOptions, window: (i64, i64)) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (t, name) in &ctx.funs {
        if t.offset == 0 {
            continue;
        }
        let base = &ctx.funs[&Term::var(t.var.clone())];
        for i in 0..=ctx.k {
            out.push(Constraint::cmp(
                IntExpr::app(name.clone(), IntExpr::lit(i)),
                Rel::Eq,
                IntExpr::app(base.clone(), IntExpr::lit(i + i64::from(t.offset))),
            ));
        }
    }
    for (var, values) in &opts.init {
        let Some(base) = ctx.funs.get(&Term::var(var.clone())) else { continue };
        for (&at, &v) in values {
            if at >= window.0 {
                out.push(Constraint::cmp(IntExpr::app(base.clone(), IntExpr::lit(at)), Rel::Eq, IntExpr::lit(v)));
            }
        }
    }
    if let Some((lo, hi)) = opts.int_range {
        for (t, name) in &ctx.funs {
            if t.offset != 0 {
                continue;
            }
            for i in window.0..=window.1 {
                let at = || IntExpr::app(name.clone(), IntExpr::lit(i));
                out.push(Constraint::cmp(at(), Rel::Ge, IntExpr::lit(lo)));
                out.push(Constraint::cmp(at(), Rel::Le, IntExpr::lit(hi)));
            }
        }
    }
    out
}

/// Boolean value of `f` at `i` expressed through the predicates of its
/// children, for the non-temporal connectives.
fn boolean_row(ctx: &Ctx, f: &Formula, i: i64) -> Option<Constraint> {
    Some(match f {
        Formula::True => Constraint::True,
        Formula::False => Constraint::False,
        Formula::Not(a) => Constraint::not(ctx.pi(a, i)),
        Formula::And(a, b) => Constraint::and(vec![ctx.pi(a, i), ctx.pi(b, i)]),
        Formula::Or(a, b) => Constraint::or(vec![ctx.pi(a, i), ctx.pi(b, i)]),
        _ => return None,
    })
}

fn encode_predicates(ctx: &Ctx, subs: &[&Formula], opts: &EncodeOptions) -> Vec<Constraint> {
    let mut out = Vec::new();
    for &f in subs {
        match f {
            Formula::Prop(p) => {
                if let Some(labels) = opts.labels.get(p) {
                    for (i, &v) in labels.iter().enumerate() {
                        let c = ctx.pi(f, i as i64);
                        out.push(if v { c } else { Constraint::not(c) });
                    }
                }
            }
            Formula::Atom(a) => {
                let prim = a.desugar();
                for i in 0..=ctx.k {
                    out.push(Constraint::iff(ctx.pi(f, i), ctx.prim(&prim, i)));
                }
            }
            _ => {
                let Some(_) = boolean_row(ctx, f, 0) else { continue };
                for i in 0..=ctx.k {
                    out.push(Constraint::iff(ctx.pi(f, i), boolean_row(ctx, f, i).unwrap()));
                }
                let tail = ctx.k + 1;
                out.push(Constraint::implies(
                    has_loop(),
                    Constraint::iff(ctx.pi(f, tail), boolean_row(ctx, f, tail).unwrap()),
                ));
            }
        }
    }
    out
}

fn encode_temporal(ctx: &Ctx, subs: &[&Formula]) -> Vec<Constraint> {
    let mut out = Vec::new();
    let k = ctx.k;
    let iff = Constraint::iff;
    for &f in subs {
        match f {
            Formula::Next(a) => {
                for i in 0..=k {
                    out.push(iff(ctx.pi(f, i), ctx.pi(a, i + 1)));
                }
            }
            Formula::Until(a, b) => {
                for i in 0..=k {
                    let step = Constraint::and(vec![ctx.pi(a, i), ctx.pi(f, i + 1)]);
                    out.push(iff(ctx.pi(f, i), Constraint::or(vec![ctx.pi(b, i), step])));
                }
            }
            Formula::Release(a, b) => {
                for i in 0..=k {
                    let step = Constraint::or(vec![ctx.pi(a, i), ctx.pi(f, i + 1)]);
                    out.push(iff(ctx.pi(f, i), Constraint::and(vec![ctx.pi(b, i), step])));
                }
            }
            Formula::Yesterday(_) | Formula::WeakYesterday(_) | Formula::Since(..) | Formula::Trigger(..) => {
                out.push(match f {
                    Formula::Yesterday(_) => Constraint::not(ctx.pi(f, 0)),
                    Formula::WeakYesterday(_) => ctx.pi(f, 0),
                    Formula::Since(_, b) | Formula::Trigger(_, b) => iff(ctx.pi(f, 0), ctx.pi(b, 0)),
                    _ => unreachable!(),
                });
                let row = |i: i64| -> Constraint {
                    let rhs = match f {
                        Formula::Yesterday(a) | Formula::WeakYesterday(a) => ctx.pi(a, i - 1),
                        Formula::Since(a, b) => {
                            Constraint::or(vec![ctx.pi(b, i), Constraint::and(vec![ctx.pi(a, i), ctx.pi(f, i - 1)])])
                        }
                        Formula::Trigger(a, b) => {
                            Constraint::and(vec![ctx.pi(b, i), Constraint::or(vec![ctx.pi(a, i), ctx.pi(f, i - 1)])])
                        }
                        _ => unreachable!(),
                    };
                    iff(ctx.pi(f, i), rhs)
                };
                for i in 1..=k {
                    out.push(row(i));
                }
                out.push(Constraint::implies(has_loop(), row(k + 1)));
            }
            _ => {}
        }
    }
    out
}

fn encode_last_state(ctx: &Ctx, subs: &[&Formula]) -> Vec<Constraint> {
    let mut out = Vec::new();
    let k = ctx.k;
    for &f in subs {
        for i in 1..=k {
            out.push(Constraint::implies(loop_is(i), Constraint::iff(ctx.pi(f, k + 1), ctx.pi(f, i))));
        }
        out.push(Constraint::implies(loop_is(0), Constraint::not(ctx.pi(f, k + 1))));
    }
    out
}

fn encode_eventualities(ctx: &Ctx, evs: &BTreeMap<Formula, String>) -> Vec<Constraint> {
    let mut out = Vec::new();
    let k = ctx.k;
    for (f, j) in evs {
        let jc = || IntExpr::constant(j.clone());
        let in_loop = || {
            vec![
                Constraint::cmp(IntExpr::constant(LOOP), Rel::Le, jc()),
                Constraint::cmp(jc(), Rel::Le, IntExpr::lit(k)),
            ]
        };
        let (trigger, mut body) = match f {
            Formula::Until(_, b) => (ctx.pi(f, k), vec![ctx.p(b, jc())]),
            Formula::Release(_, b) => (Constraint::not(ctx.pi(f, k)), vec![Constraint::not(ctx.p(b, jc()))]),
            _ => unreachable!("eventualities are until/release nodes"),
        };
        let mut conj = in_loop();
        conj.append(&mut body);
        out.push(Constraint::implies(has_loop(), Constraint::implies(trigger, Constraint::and(conj))));
    }
    out
}

/// Per-component assertion counts of an assembled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComponentSizes {
    pub time: usize,
    pub atts: usize,
    pub predicates: usize,
    pub temporal: usize,
    pub last_state: usize,
    pub eventualities: usize,
}

/// Builds the whole constraint system for `f` at bound `k`.
pub fn assemble(f: &Formula, k: usize, opts: &EncodeOptions) -> Result<(ConstraintSystem, EncodingMeta), EncodeError> {
    assemble_with_sizes(f, k, opts).map(|(cs, meta, _)| (cs, meta))
}

pub fn assemble_with_sizes(
    f: &Formula,
    k: usize,
    opts: &EncodeOptions,
) -> Result<(ConstraintSystem, EncodingMeta, ComponentSizes), EncodeError> {
    if k == 0 {
        return Err(EncodeError::ZeroBound);
    }
    if !f.is_pnf() {
        return Err(EncodeError::NotPnf);
    }
    for (p, labels) in &opts.labels {
        if labels.len() != k + 1 {
            return Err(EncodeError::LabelLength { prop: p.clone(), got: labels.len(), expected: k + 1 });
        }
    }
    let info = analyze(f);
    let window = (i64::from(info.min_depth), k as i64 + i64::from(info.max_depth));
    for (var, values) in &opts.init {
        if let Some((&at, _)) = values.iter().find(|(&at, _)| at >= 0 || at < window.0) {
            return Err(EncodeError::InitOutOfWindow { var: var.clone(), at });
        }
    }
    let subs = subformulas(f);
    let index: BTreeMap<&Formula, usize> = subs.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut funs: BTreeMap<Term, String> = BTreeMap::new();
    for v in &info.variables {
        let t = Term::var(v.clone());
        funs.insert(t.clone(), fun_name(&t));
    }
    for t in f.terms() {
        funs.insert(t.clone(), fun_name(&t));
    }
    let ctx = Ctx { k: k as i64, index, funs };

    let evs: BTreeMap<Formula, String> =
        subs.iter().filter(|s| s.is_eventuality()).map(|&s| ((*s).clone(), format!("J{}", ctx.index[s]))).collect();

    let props: Vec<&Formula> = subs.iter().copied().filter(|s| matches!(s, Formula::Prop(_))).collect();
    let time = encode_time(&props, k, |p| ctx.name(p), opts.shape);
    let atts = encode_atts(&ctx, opts, window);
    let preds = encode_predicates(&ctx, &subs, opts);
    let temporal = encode_temporal(&ctx, &subs);
    let last = encode_last_state(&ctx, &subs);
    let eventualities = encode_eventualities(&ctx, &evs);
    let sizes = ComponentSizes {
        time: time.len(),
        atts: atts.len(),
        predicates: preds.len(),
        temporal: temporal.len(),
        last_state: last.len(),
        eventualities: eventualities.len(),
    };

    let mut int_consts = vec![LOOP.to_string()];
    let mut ev_order: Vec<(usize, &String)> = evs.iter().map(|(f, j)| (ctx.index[f], j)).collect();
    ev_order.sort();
    int_consts.extend(ev_order.into_iter().map(|(_, j)| j.clone()));

    let int_funs = ctx
        .funs
        .iter()
        .map(|(t, name)| {
            let (lo, hi) = if t.offset == 0 { window } else { (0, k as i64) };
            IntFun { name: name.clone(), lo, hi }
        })
        .collect();

    let mut assertions = Vec::new();
    for part in [time, atts, preds, temporal, last, eventualities] {
        assertions.extend(part);
    }
    assertions.push(ctx.pi(f, 0));

    let cs = ConstraintSystem {
        int_consts,
        int_funs,
        predicates: (0..subs.len()).map(|i| format!("P{i}")).collect(),
        last_instant: k as i64 + 1,
        assertions,
    };
    let meta = EncodingMeta {
        k,
        predicate_of: subs.iter().map(|&s| (s.clone(), ctx.name(s))).collect(),
        fun_of: ctx.funs.clone(),
        loop_name: LOOP.to_string(),
        eventuality_names: evs,
        window,
        variables: info.variables,
        propositions: info.propositions,
    };
    Ok((cs, meta, sizes))
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Lit(v) => write!(f, "{v}"),
            IntExpr::Const(c) => write!(f, "{c}"),
            IntExpr::App(g, a) => write!(f, "{g}({a})"),
            IntExpr::Add(e, c) if *c < 0 => write!(f, "{e} - {}", -c),
            IntExpr::Add(e, c) => write!(f, "{e} + {c}"),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[Constraint], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            Constraint::True => write!(f, "true"),
            Constraint::False => write!(f, "false"),
            Constraint::Pred(p, e) => write!(f, "{p}({e})"),
            Constraint::Cmp(l, r, e) => write!(f, "{l} {} {e}", r.symbol()),
            Constraint::Not(a) => write!(f, "!{a}"),
            Constraint::And(xs) => join(f, xs, "&"),
            Constraint::Or(xs) => join(f, xs, "|"),
            Constraint::Implies(a, b) => write!(f, "({a} -> {b})"),
            Constraint::Iff(a, b) => write!(f, "({a} <-> {b})"),
        }
    }
}
