//! Service protocols as labelled transition systems, loaded from JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub from: String,
    pub op: String,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceLts {
    pub name: String,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Compatibility {
    /// Pairs of (expected state, actual state).
    pub states: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceModel {
    pub expected: ServiceLts,
    pub actual: ServiceLts,
    pub compatibility: Compatibility,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid service model: {0}")]
    Json(#[from] serde_json::Error),
    #[error("service `{service}`: state `{state}` is declared twice")]
    DuplicateState { service: String, state: String },
    #[error("service `{service}`: undeclared state `{state}`")]
    UnknownState { service: String, state: String },
    #[error("service `{service}`: operation `{op}` leaves state `{from}` twice")]
    DuplicateTransition { service: String, from: String, op: String },
    #[error("service `{service}`: `{name}` is not an identifier")]
    BadName { service: String, name: String },
    #[error("compatibility pair refers to undeclared {side} state `{state}`")]
    UnknownCompatState { side: &'static str, state: String },
    #[error("service `{0}` has no states")]
    NoStates(String),
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ServiceLts {
    pub fn state_index(&self, s: &str) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }

    /// Operation names in order of first appearance.
    pub fn operations(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.transitions.iter().map(|t| t.op.as_str()).filter(|op| seen.insert(*op)).collect()
    }

    pub fn step(&self, from: &str, op: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.from == from && t.op == op)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let service = || self.name.clone();
        if self.states.is_empty() {
            return Err(ModelError::NoStates(self.name.clone()));
        }
        let mut states = BTreeSet::new();
        for s in &self.states {
            if !is_ident(s) {
                return Err(ModelError::BadName { service: service(), name: s.clone() });
            }
            if !states.insert(s.as_str()) {
                return Err(ModelError::DuplicateState { service: service(), state: s.clone() });
            }
        }
        let known = |s: &str| {
            if states.contains(s) {
                Ok(())
            } else {
                Err(ModelError::UnknownState { service: service(), state: s.to_string() })
            }
        };
        known(&self.initial)?;
        let mut edges = BTreeSet::new();
        for t in &self.transitions {
            known(&t.from)?;
            known(&t.to)?;
            for name in std::iter::once(&t.op).chain(&t.inputs).chain(&t.outputs) {
                if !is_ident(name) {
                    return Err(ModelError::BadName { service: service(), name: name.clone() });
                }
            }
            if !edges.insert((t.from.as_str(), t.op.as_str())) {
                return Err(ModelError::DuplicateTransition {
                    service: service(),
                    from: t.from.clone(),
                    op: t.op.clone(),
                });
            }
        }
        Ok(())
    }
}

impl ServiceModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let model: ServiceModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.expected.validate()?;
        self.actual.validate()?;
        for (e, a) in &self.compatibility.states {
            if self.expected.state_index(e).is_none() {
                return Err(ModelError::UnknownCompatState { side: "expected", state: e.clone() });
            }
            if self.actual.state_index(a).is_none() {
                return Err(ModelError::UnknownCompatState { side: "actual", state: a.clone() });
            }
        }
        Ok(())
    }

    pub fn compatible(&self, expected: &str, actual: &str) -> bool {
        self.compatibility.states.iter().any(|(e, a)| e == expected && a == actual)
    }
}

/// Count of each parameter type in a parameter list.
pub fn multiplicities(params: &[String]) -> BTreeMap<&str, i64> {
    let mut out = BTreeMap::new();
    for p in params {
        *out.entry(p.as_str()).or_insert(0) += 1;
    }
    out
}

/// Bound suggestion: the number of states of both services plus, for each
/// operation, how many times it repeats in the expected sequence.
pub fn bound_heuristic(model: &ServiceModel, expected_seq: &[String]) -> usize {
    let mut occurrences: BTreeMap<&str, usize> = BTreeMap::new();
    for op in expected_seq {
        *occurrences.entry(op.as_str()).or_insert(0) += 1;
    }
    let repeats: usize = occurrences.values().map(|&n| n.saturating_sub(1)).sum();
    model.expected.states.len() + model.actual.states.len() + repeats
}
