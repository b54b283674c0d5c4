//! Mapping scripts: the step-by-step adaptation read from a witness trace.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::compile::{
    actual_prop, expected_prop, Counter, CounterKind, Problem, Strategy, ACTUAL_STATE, EXPECTED_STATE,
};
use super::model::{ServiceLts, ServiceModel, Transition};
use crate::formula::Formula;
use crate::oracle;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCall {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl From<&Transition> for OpCall {
    fn from(t: &Transition) -> Self {
        OpCall { name: t.op.clone(), inputs: t.inputs.clone(), outputs: t.outputs.clone() }
    }
}

/// One row: the states at an instant, the operations fired there, and the
/// counter values on entering it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub step: usize,
    pub instant: usize,
    pub expected_state: String,
    pub expected_op: Option<OpCall>,
    pub actual_state: String,
    pub actual_op: Option<OpCall>,
    pub counters: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingScript {
    pub expected_service: String,
    pub actual_service: String,
    pub strategy: Strategy,
    pub steps: Vec<Step>,
}

impl MappingScript {
    pub fn expected_ops(&self) -> Vec<&str> {
        self.steps.iter().filter_map(|s| s.expected_op.as_ref()).map(|o| o.name.as_str()).collect()
    }

    pub fn actual_ops(&self) -> Vec<&str> {
        self.steps.iter().filter_map(|s| s.actual_op.as_ref()).map(|o| o.name.as_str()).collect()
    }

    pub fn final_step(&self) -> &Step {
        self.steps.last().expect("a script has at least one step")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("witness never reaches the goal")]
    NoGoal,
    #[error("witness is not a model of the problem: {0}")]
    Eval(#[from] oracle::EvalError),
    #[error("instant {instant}: {msg}")]
    Inconsistent { instant: usize, msg: String },
}

fn state_name(lts: &ServiceLts, trace: &Trace, var: &str, i: usize) -> Result<String, ScriptError> {
    let bad = |msg: String| ScriptError::Inconsistent { instant: i, msg };
    let idx = trace.var(var, i as i64).ok_or_else(|| bad(format!("no value for `{var}`")))?;
    usize::try_from(idx)
        .ok()
        .and_then(|x| lts.states.get(x))
        .cloned()
        .ok_or_else(|| bad(format!("`{var}` = {idx} is not a state of {}", lts.name)))
}

fn fired<'a>(
    lts: &'a ServiceLts,
    trace: &Trace,
    prop: impl Fn(Option<&str>) -> String,
    state: &str,
    i: usize,
) -> Result<Option<&'a Transition>, ScriptError> {
    let on: Vec<&str> =
        lts.operations().into_iter().filter(|op| trace.prop(&prop(Some(op)), i) == Some(true)).collect();
    match on.as_slice() {
        [] => Ok(None),
        [op] => lts.step(state, op).map(Some).ok_or_else(|| ScriptError::Inconsistent {
            instant: i,
            msg: format!("`{op}` is not enabled in state `{state}` of {}", lts.name),
        }),
        _ => Err(ScriptError::Inconsistent { instant: i, msg: format!("several operations of {} at once", lts.name) }),
    }
}

/// First instant at which the goal holds with every earlier instant a
/// valid step.
pub fn goal_instant(problem: &Problem, trace: &Trace) -> Result<usize, ScriptError> {
    let step = oracle::eval_all(&Formula::and(problem.step.clone(), problem.invariant.clone()), trace)?;
    let goal = oracle::eval_all(&Formula::and(problem.goal.clone(), problem.invariant.clone()), trace)?;
    for j in 0..=trace.k {
        if goal[j] {
            return Ok(j);
        }
        if !step[j] {
            break;
        }
    }
    Err(ScriptError::NoGoal)
}

/// Reads a witness of `problem` as a mapping script. Instants where both
/// services stutter are left out; the first and the goal instant are kept.
pub fn render_script(problem: &Problem, model: &ServiceModel, trace: &Trace) -> Result<MappingScript, ScriptError> {
    let goal = goal_instant(problem, trace)?;
    let mut steps = Vec::new();
    for i in 0..=goal {
        let expected_state = state_name(&model.expected, trace, EXPECTED_STATE, i)?;
        let actual_state = state_name(&model.actual, trace, ACTUAL_STATE, i)?;
        let (e, a) = if i < goal {
            (
                fired(&model.expected, trace, expected_prop, &expected_state, i)?,
                fired(&model.actual, trace, actual_prop, &actual_state, i)?,
            )
        } else {
            (None, None)
        };
        if i != 0 && i != goal && e.is_none() && a.is_none() {
            continue;
        }
        let mut counters = BTreeMap::new();
        for c in &problem.counters {
            let value = trace
                .var(&c.var(), i as i64)
                .ok_or_else(|| ScriptError::Inconsistent { instant: i, msg: format!("no value for `{}`", c.var()) })?;
            counters.insert(c.label(), value);
        }
        steps.push(Step {
            step: steps.len() + 1,
            instant: i,
            expected_state,
            expected_op: e.map(OpCall::from),
            actual_state,
            actual_op: a.map(OpCall::from),
            counters,
        });
    }
    Ok(MappingScript {
        expected_service: model.expected.name.clone(),
        actual_service: model.actual.name.clone(),
        strategy: problem.strategy,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: {msg}")]
    Step { step: usize, msg: String },
    #[error("final step: {0}")]
    Final(String),
}

fn counter_of(label: &str) -> Option<Counter> {
    let (kind, rest) = if let Some(r) = label.strip_prefix("seen(") {
        (CounterKind::Seen, r)
    } else {
        (CounterKind::Needed, label.strip_prefix("needed(")?)
    };
    Some(Counter { kind, param: rest.strip_suffix(')')?.to_string() })
}

fn as_transition(op: &OpCall, from: &str, lts: &ServiceLts) -> Option<Transition> {
    let t = lts.step(from, &op.name)?;
    (t.inputs == op.inputs && t.outputs == op.outputs).then(|| t.clone())
}

/// Recomputes every counter snapshot and state from the operations of the
/// script alone, and checks the end conditions.
pub fn replay(script: &MappingScript, model: &ServiceModel, expected_seq: &[String]) -> Result<(), ReplayError> {
    let first = script.steps.first().ok_or_else(|| ReplayError::Final("empty script".into()))?;
    let err = |step: usize, msg: String| ReplayError::Step { step, msg };
    if first.expected_state != model.expected.initial || first.actual_state != model.actual.initial {
        return Err(err(1, "does not start in the initial states".into()));
    }
    if let Some((name, v)) = first.counters.iter().find(|(_, v)| **v != 0) {
        return Err(err(1, format!("{name} starts at {v}")));
    }
    for pair in script.steps.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        let e =
            match &cur.expected_op {
                Some(op) => Some(as_transition(op, &cur.expected_state, &model.expected).ok_or_else(|| {
                    err(cur.step, format!("`{}` is not a transition of the expected service", op.name))
                })?),
                None => None,
            };
        let a = match &cur.actual_op {
            Some(op) => Some(
                as_transition(op, &cur.actual_state, &model.actual)
                    .ok_or_else(|| err(cur.step, format!("`{}` is not a transition of the actual service", op.name)))?,
            ),
            None => None,
        };
        let expected_next = e.as_ref().map_or(&cur.expected_state, |t| &t.to);
        let actual_next = a.as_ref().map_or(&cur.actual_state, |t| &t.to);
        if &next.expected_state != expected_next || &next.actual_state != actual_next {
            return Err(err(next.step, "states do not follow the fired operations".into()));
        }
        if cur.expected_op.is_some() {
            if let Some((name, v)) = cur.counters.iter().find(|(n, v)| n.starts_with("needed(") && **v > 0) {
                return Err(err(cur.step, format!("request issued while {name} = {v}")));
            }
        }
        for (label, &value) in &cur.counters {
            let c = counter_of(label).ok_or_else(|| err(cur.step, format!("unknown counter `{label}`")))?;
            let mid = value + e.as_ref().map_or(0, |t| c.delta(t));
            let dec = a.as_ref().map_or(0, |t| c.delta(t));
            let after = if script.strategy == Strategy::Discard && c.kind == CounterKind::Needed && dec > 0 {
                if mid >= dec {
                    mid - dec
                } else {
                    0
                }
            } else {
                mid - dec
            };
            let got = next.counters.get(label).copied();
            if got != Some(after) {
                return Err(err(next.step, format!("{label} should be {after}, found {got:?}")));
            }
            if c.kind == CounterKind::Seen && after < 0 {
                return Err(err(next.step, format!("{label} is negative")));
            }
        }
    }
    let last = script.final_step();
    if script.expected_ops() != expected_seq.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(ReplayError::Final("expected operations differ from the requested sequence".into()));
    }
    if !model.compatible(&last.expected_state, &last.actual_state) {
        return Err(ReplayError::Final(format!(
            "states ({}, {}) are not compatible",
            last.expected_state, last.actual_state
        )));
    }
    if let Some((name, v)) = last.counters.iter().find(|(n, v)| n.starts_with("needed(") && **v > 0) {
        return Err(ReplayError::Final(format!("{name} = {v}")));
    }
    Ok(())
}

fn op_text(op: &Option<OpCall>) -> String {
    match op {
        None => "None".into(),
        Some(op) => format!("{}({}) -> {}", op.name, op.inputs.join(", "), op.outputs.join(", ")),
    }
}

fn counters_text(counters: &BTreeMap<String, i64>) -> Vec<String> {
    let nonzero: Vec<String> = counters.iter().filter(|(_, v)| **v != 0).map(|(k, v)| format!("{k} = {v}")).collect();
    if nonzero.is_empty() {
        vec!["all counters 0".into()]
    } else {
        nonzero
    }
}

impl fmt::Display for MappingScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rows: Vec<(String, Vec<String>, Vec<String>)> = Vec::new();
        for s in &self.steps {
            let content = vec![
                format!(
                    "{} state: {}; operation: {}",
                    self.expected_service,
                    s.expected_state,
                    op_text(&s.expected_op)
                ),
                format!("{} state: {}; operation: {}", self.actual_service, s.actual_state, op_text(&s.actual_op)),
            ];
            rows.push((s.step.to_string(), content, counters_text(&s.counters)));
        }
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(4);
        let w1 = rows.iter().flat_map(|r| r.1.iter().map(String::len)).max().unwrap_or(0).max(15);
        writeln!(f, "{:w0$} | {:w1$} | counters", "step", "execution trace")?;
        writeln!(f, "{}-+-{}-+-{}", "-".repeat(w0), "-".repeat(w1), "-".repeat(8))?;
        for (step, content, counters) in rows {
            let height = content.len().max(counters.len());
            for line in 0..height {
                let first = if line == 0 { step.as_str() } else { "" };
                let c = content.get(line).map_or("", String::as_str);
                let n = counters.get(line).map_or("", String::as_str);
                writeln!(f, "{first:w0$} | {c:w1$} | {n}")?;
            }
            writeln!(f, "{}-+-{}-+-{}", "-".repeat(w0), "-".repeat(w1), "-".repeat(8))?;
        }
        Ok(())
    }
}
