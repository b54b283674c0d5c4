//! Behavioural substitutability of services, decided by bounded
//! satisfiability of a counter-based formula.

mod compile;
mod model;
mod script;

use thiserror::Error;

pub use compile::{compile_problem, CompileError, Counter, CounterKind, Problem, Strategy};
pub use model::{bound_heuristic, multiplicities, Compatibility, ModelError, ServiceLts, ServiceModel, Transition};
pub use script::{goal_instant, render_script, replay, MappingScript, OpCall, ReplayError, ScriptError, Step};

use crate::encoder::EncodeOptions;
use crate::smt::{check_sat, CheckError, SolverConfig, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Substitutable(MappingScript),
    NotSubstitutable,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstReport {
    pub k: usize,
    pub outcome: Outcome,
    /// Solver calls made, including the minimisation rounds.
    pub solver_calls: usize,
}

#[derive(Debug, Error)]
pub enum SubstError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("internal inconsistency in the witness: {0}")]
    Script(#[from] ScriptError),
    #[error("bound must be at least 1")]
    ZeroBound,
}

#[derive(Debug, Clone, Default)]
pub struct SubstOptions {
    pub strategy: Strategy,
    /// Defaults to [`bound_heuristic`].
    pub k: Option<usize>,
    /// Look for an adaptation with as few actual operations as possible.
    pub minimize: bool,
}

enum Attempt {
    Found(MappingScript),
    None,
    Unknown(String),
}

fn attempt(
    model: &ServiceModel,
    seq: &[String],
    strategy: Strategy,
    k: usize,
    cap: Option<usize>,
    cfg: &SolverConfig,
) -> Result<Attempt, SubstError> {
    let problem = compile_problem(model, seq, strategy, cap)?;
    let verdict = check_sat(&problem.formula, k, &EncodeOptions::default(), cfg)?;
    match verdict.status {
        Status::Sat => {
            let trace = verdict.trace.expect("sat verdicts carry a trace");
            Ok(Attempt::Found(render_script(&problem, model, &trace)?))
        }
        Status::Unsat => Ok(Attempt::None),
        Status::Unknown => Ok(Attempt::Unknown(verdict.diagnostics)),
        Status::SolverError => Err(SubstError::Solver(verdict.diagnostics)),
    }
}

/// Searches an actual operation sequence that serves `seq` within `k`
/// instants. With `minimize`, the returned script uses the fewest actual
/// operations among all admissible ones.
pub fn check_substitutable(
    model: &ServiceModel,
    seq: &[String],
    opts: &SubstOptions,
    cfg: &SolverConfig,
) -> Result<SubstReport, SubstError> {
    let k = opts.k.unwrap_or_else(|| bound_heuristic(model, seq));
    if k == 0 {
        return Err(SubstError::ZeroBound);
    }
    let report = |outcome, solver_calls| SubstReport { k, outcome, solver_calls };
    let mut best = match attempt(model, seq, opts.strategy, k, None, cfg)? {
        Attempt::Found(s) => s,
        Attempt::None => return Ok(report(Outcome::NotSubstitutable, 1)),
        Attempt::Unknown(d) => return Ok(report(Outcome::Unknown(d), 1)),
    };
    let mut calls = 1;
    if opts.minimize {
        for cap in 0..best.actual_ops().len() {
            calls += 1;
            match attempt(model, seq, opts.strategy, k, Some(cap), cfg)? {
                Attempt::Found(s) => {
                    best = s;
                    break;
                }
                Attempt::None => {}
                // The unbounded witness stays valid; it just may not be minimal.
                Attempt::Unknown(_) => break,
            }
        }
    }
    Ok(report(Outcome::Substitutable(best), calls))
}
