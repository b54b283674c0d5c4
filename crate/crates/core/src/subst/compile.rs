//! Translation of a substitutability question into a single formula.
//!
//! Each service's current state is an integer variable (`se`, `sa`); each
//! operation is a proposition (`e_<op>`, `a_<op>`, plus `e_none`/`a_none`
//! for stuttering), exactly one of which holds per service per instant.
//! `ex` counts how much of the expected sequence has been consumed, and
//! `acted` how many actual operations have fired.
//!
//! Counters change in two half-steps so that every atom stays a difference
//! constraint: the expected operation moves `c` to the intermediate `c_m`
//! (same instant), the actual operation moves `c_m` to `X c`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{multiplicities, ServiceLts, ServiceModel, Transition};
use crate::formula::{to_pnf, Formula, Rel, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Outputs nobody asked for are thrown away.
    Discard,
    /// Outputs nobody asked for are kept for later requests.
    #[default]
    Store,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "store" => Ok(Strategy::Store),
            "discard" => Ok(Strategy::Discard),
            other => Err(format!("unknown strategy `{other}` (expected store or discard)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("operation `{0}` does not belong to the expected service")]
    UnknownOperation(String),
    #[error("expected sequence is not a path: `{op}` is not enabled in state `{state}`")]
    NotAPath { op: String, state: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CounterKind {
    Seen,
    Needed,
}

/// A `seen` or `needed` counter for one parameter type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Counter {
    pub kind: CounterKind,
    pub param: String,
}

impl Counter {
    pub fn var(&self) -> String {
        match self.kind {
            CounterKind::Seen => format!("seen_{}", self.param),
            CounterKind::Needed => format!("needed_{}", self.param),
        }
    }

    pub fn mid(&self) -> String {
        format!("{}_m", self.var())
    }

    pub fn label(&self) -> String {
        match self.kind {
            CounterKind::Seen => format!("seen({})", self.param),
            CounterKind::Needed => format!("needed({})", self.param),
        }
    }

    /// Change caused by one firing of `t` (as an increment for expected
    /// operations, a decrement for actual ones).
    pub fn delta(&self, t: &Transition) -> i64 {
        let params = match self.kind {
            CounterKind::Seen => &t.inputs,
            CounterKind::Needed => &t.outputs,
        };
        multiplicities(params).get(self.param.as_str()).copied().unwrap_or(0)
    }
}

pub const EXPECTED_STATE: &str = "se";
pub const ACTUAL_STATE: &str = "sa";
pub const PROGRESS: &str = "ex";
pub const ACTED: &str = "acted";

pub fn expected_prop(op: Option<&str>) -> String {
    format!("e_{}", op.unwrap_or("none"))
}

pub fn actual_prop(op: Option<&str>) -> String {
    format!("a_{}", op.unwrap_or("none"))
}

/// The compiled question with the pieces needed to read a witness back.
#[derive(Debug, Clone)]
pub struct Problem {
    pub formula: Formula,
    pub counters: Vec<Counter>,
    pub expected_seq: Vec<String>,
    pub strategy: Strategy,
    /// Goal condition alone (reaching it at some instant ends the run).
    pub goal: Formula,
    /// What must hold at every instant before the goal.
    pub step: Formula,
    /// What must hold at every instant up to and including the goal.
    pub invariant: Formula,
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn is(var: &str, value: i64) -> Formula {
    Formula::cmp_const(v(var), Rel::Eq, value)
}

fn next_is(var: &str, value: i64) -> Formula {
    Formula::cmp_const(v(var).shifted(1), Rel::Eq, value)
}

/// `lhs = rhs + shift`
fn eq(lhs: Term, rhs: Term, shift: i64) -> Formula {
    Formula::atom(lhs, Rel::Eq, rhs, shift)
}

fn exactly_one(props: &[String]) -> Formula {
    let mut parts = vec![Formula::or_all(props.iter().map(Formula::prop))];
    for (i, a) in props.iter().enumerate() {
        for b in &props[i + 1..] {
            parts.push(Formula::or(Formula::not(Formula::prop(a)), Formula::not(Formula::prop(b))));
        }
    }
    Formula::and_all(parts)
}

fn collect_counters(model: &ServiceModel) -> Vec<Counter> {
    let mut out = BTreeSet::new();
    for t in model.expected.transitions.iter().chain(&model.actual.transitions) {
        for p in &t.inputs {
            out.insert(Counter { kind: CounterKind::Seen, param: p.clone() });
        }
        for p in &t.outputs {
            out.insert(Counter { kind: CounterKind::Needed, param: p.clone() });
        }
    }
    out.into_iter().collect()
}

/// Transition firing condition: its operation holds and the service is in
/// its source state.
fn fires(lts: &ServiceLts, t: &Transition, prop: &dyn Fn(Option<&str>) -> String, state_var: &str) -> Formula {
    let from = lts.state_index(&t.from).expect("validated model") as i64;
    Formula::and(Formula::prop(prop(Some(&t.op))), is(state_var, from))
}

/// State evolution, enabledness and stuttering of one service.
fn service_moves(lts: &ServiceLts, prop: &dyn Fn(Option<&str>) -> String, state_var: &str) -> Vec<Formula> {
    let mut out = Vec::new();
    let ops = lts.operations();
    let mut props: Vec<String> = ops.iter().map(|o| prop(Some(o))).collect();
    props.push(prop(None));
    out.push(exactly_one(&props));
    for op in &ops {
        let sources = lts
            .transitions
            .iter()
            .filter(|t| t.op == *op)
            .map(|t| is(state_var, lts.state_index(&t.from).unwrap() as i64));
        out.push(Formula::implies(Formula::prop(prop(Some(op))), Formula::or_all(sources)));
    }
    for t in &lts.transitions {
        let to = lts.state_index(&t.to).unwrap() as i64;
        out.push(Formula::implies(fires(lts, t, prop, state_var), next_is(state_var, to)));
    }
    out.push(Formula::implies(Formula::prop(prop(None)), eq(v(state_var).shifted(1), v(state_var), 0)));
    out
}

/// For each distinct nonzero effect `d` on a counter: firing any transition
/// with that effect implies `update(d)`; firing none implies `update(0)`.
fn counter_effects(
    lts: &ServiceLts,
    prop: &dyn Fn(Option<&str>) -> String,
    state_var: &str,
    c: &Counter,
    update: &dyn Fn(i64) -> Formula,
) -> Vec<Formula> {
    let mut by_delta: BTreeMap<i64, Vec<&Transition>> = BTreeMap::new();
    for t in &lts.transitions {
        let d = c.delta(t);
        if d != 0 {
            by_delta.entry(d).or_default().push(t);
        }
    }
    let mut out = Vec::new();
    let mut any = Vec::new();
    for (d, ts) in by_delta {
        let cond = Formula::or_all(ts.iter().map(|t| fires(lts, t, prop, state_var)));
        any.push(cond.clone());
        out.push(Formula::implies(cond, update(d)));
    }
    out.push(Formula::implies(Formula::not(Formula::or_all(any)), update(0)));
    out
}

/// Builds the formula whose models are the admissible adaptations.
///
/// The formula reads `init & ((step & inv) U (goal & inv))`; `max_actual`
/// optionally caps the number of actual operations.
pub fn compile_problem(
    model: &ServiceModel,
    expected_seq: &[String],
    strategy: Strategy,
    max_actual: Option<usize>,
) -> Result<Problem, CompileError> {
    let exp = &model.expected;
    let act = &model.actual;
    let ops = exp.operations();
    let mut state = exp.initial.clone();
    for op in expected_seq {
        if !ops.contains(&op.as_str()) {
            return Err(CompileError::UnknownOperation(op.clone()));
        }
        let t = exp.step(&state, op).ok_or_else(|| CompileError::NotAPath { op: op.clone(), state: state.clone() })?;
        state = t.to.clone();
    }

    let counters = collect_counters(model);
    let eprop = |o: Option<&str>| expected_prop(o);
    let aprop = |o: Option<&str>| actual_prop(o);

    let mut init = vec![
        is(EXPECTED_STATE, exp.state_index(&exp.initial).unwrap() as i64),
        is(ACTUAL_STATE, act.state_index(&act.initial).unwrap() as i64),
        is(PROGRESS, 0),
        is(ACTED, 0),
    ];
    init.extend(counters.iter().map(|c| is(&c.var(), 0)));

    let mut step = service_moves(exp, &eprop, EXPECTED_STATE);
    step.extend(service_moves(act, &aprop, ACTUAL_STATE));

    // The expected sequence, in order.
    for op in &ops {
        let slots = expected_seq.iter().enumerate().filter(|(_, o)| o == op).map(|(j, _)| is(PROGRESS, j as i64));
        step.push(Formula::implies(
            Formula::prop(eprop(Some(op))),
            Formula::and(Formula::or_all(slots), eq(v(PROGRESS).shifted(1), v(PROGRESS), 1)),
        ));
    }
    step.push(Formula::implies(Formula::prop(eprop(None)), eq(v(PROGRESS).shifted(1), v(PROGRESS), 0)));

    // A client waits for the replies it is owed before its next request.
    let settled = Formula::and_all(
        counters.iter().filter(|c| c.kind == CounterKind::Needed).map(|c| Formula::cmp_const(v(&c.var()), Rel::Le, 0)),
    );
    step.push(Formula::or(Formula::prop(eprop(None)), settled.clone()));

    for c in &counters {
        let (var, mid) = (c.var(), c.mid());
        step.extend(counter_effects(exp, &eprop, EXPECTED_STATE, c, &|d| eq(v(&mid), v(&var), d)));
        let discard = strategy == Strategy::Discard && c.kind == CounterKind::Needed;
        step.extend(counter_effects(act, &aprop, ACTUAL_STATE, c, &|d| {
            let next = v(&var).shifted(1);
            if discard && d > 0 {
                Formula::or(
                    Formula::and(Formula::cmp_const(v(&mid), Rel::Ge, d), eq(next.clone(), v(&mid), -d)),
                    Formula::and(Formula::cmp_const(v(&mid), Rel::Lt, d), Formula::cmp_const(next, Rel::Eq, 0)),
                )
            } else {
                eq(next, v(&mid), -d)
            }
        }));
    }

    step.push(Formula::implies(Formula::prop(aprop(None)), eq(v(ACTED).shifted(1), v(ACTED), 0)));
    step.push(Formula::implies(Formula::not(Formula::prop(aprop(None))), eq(v(ACTED).shifted(1), v(ACTED), 1)));

    let invariant = Formula::and_all(
        counters.iter().filter(|c| c.kind == CounterKind::Seen).map(|c| Formula::cmp_const(v(&c.var()), Rel::Ge, 0)),
    );

    let compat = model.compatibility.states.iter().map(|(e, a)| {
        Formula::and(
            is(EXPECTED_STATE, exp.state_index(e).unwrap() as i64),
            is(ACTUAL_STATE, act.state_index(a).unwrap() as i64),
        )
    });
    let mut goal = vec![is(PROGRESS, expected_seq.len() as i64), Formula::or_all(compat), settled];
    if let Some(cap) = max_actual {
        goal.push(Formula::cmp_const(v(ACTED), Rel::Le, cap as i64));
    }
    let goal = to_pnf(&Formula::and_all(goal));
    let step = to_pnf(&Formula::and_all(step));
    let invariant = to_pnf(&invariant);

    let formula = Formula::and(
        Formula::and_all(init),
        Formula::until(Formula::and(step.clone(), invariant.clone()), Formula::and(goal.clone(), invariant.clone())),
    );
    Ok(Problem {
        formula: to_pnf(&formula),
        counters,
        expected_seq: expected_seq.to_vec(),
        strategy,
        goal,
        step,
        invariant,
    })
}
