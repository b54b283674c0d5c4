//! Finite, possibly looping, traces with propositional and integer valuations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Values of one integer variable over a contiguous window of instants.
/// Negative instants carry the initialization values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarValues {
    pub start: i64,
    pub values: Vec<i64>,
}

impl VarValues {
    pub fn get(&self, instant: i64) -> Option<i64> {
        let idx = usize::try_from(instant - self.start).ok()?;
        self.values.get(idx).copied()
    }

    /// Last covered instant.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }
}

/// A path `s_0 .. s_k` with an optional loop back.
///
/// `loop_at == 0` means the path is acyclic. `loop_at == i >= 1` means the
/// successor of instant `k` is instant `i`, and the labels of instants
/// `i - 1` and `k` coincide. Propositions are recorded over `0..=k+1`; the
/// extra instant mirrors `loop_at` (or is false on acyclic paths).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub k: usize,
    #[serde(rename = "loop")]
    pub loop_at: usize,
    pub props: BTreeMap<String, Vec<bool>>,
    pub vars: BTreeMap<String, VarValues>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("loop position {loop_at} outside 0..={k}")]
    LoopOutOfRange { loop_at: usize, k: usize },
    #[error("proposition `{0}` needs {1} values")]
    PropLength(String, usize),
    #[error("proposition `{prop}` differs at instants {a} and {b} of a looping trace")]
    LoopLabel { prop: String, a: usize, b: usize },
    #[error("proposition `{0}` must be false at instant k+1 of an acyclic trace")]
    AcyclicTail(String),
}

impl Trace {
    pub fn new(k: usize, loop_at: usize) -> Self {
        Trace { k, loop_at, props: BTreeMap::new(), vars: BTreeMap::new() }
    }

    pub fn has_loop(&self) -> bool {
        self.loop_at >= 1
    }

    /// Adds a proposition from its values over `0..=k`; the value at `k+1`
    /// is derived from the loop.
    pub fn with_prop(mut self, name: impl Into<String>, values: &[bool]) -> Self {
        assert_eq!(values.len(), self.k + 1, "proposition values must cover 0..=k");
        let mut v = values.to_vec();
        v.push(self.has_loop() && values[self.loop_at]);
        self.props.insert(name.into(), v);
        self
    }

    pub fn with_var(mut self, name: impl Into<String>, start: i64, values: &[i64]) -> Self {
        self.vars.insert(name.into(), VarValues { start, values: values.to_vec() });
        self
    }

    pub fn prop(&self, name: &str, instant: usize) -> Option<bool> {
        self.props.get(name)?.get(instant).copied()
    }

    pub fn var(&self, name: &str, instant: i64) -> Option<i64> {
        self.vars.get(name)?.get(instant)
    }

    /// Checks the structural invariants of a lasso-shaped path.
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.loop_at > self.k {
            return Err(TraceError::LoopOutOfRange { loop_at: self.loop_at, k: self.k });
        }
        for (p, vals) in &self.props {
            if vals.len() != self.k + 2 {
                return Err(TraceError::PropLength(p.clone(), self.k + 2));
            }
            if self.has_loop() {
                let l = self.loop_at;
                if vals[l - 1] != vals[self.k] {
                    return Err(TraceError::LoopLabel { prop: p.clone(), a: l - 1, b: self.k });
                }
                if vals[self.k + 1] != vals[l] {
                    return Err(TraceError::LoopLabel { prop: p.clone(), a: self.k + 1, b: l });
                }
            } else if vals[self.k + 1] {
                return Err(TraceError::AcyclicTail(p.clone()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.has_loop() {
            writeln!(f, "k = {}, loop back to instant {}", self.k, self.loop_at)?;
        } else {
            writeln!(f, "k = {}, no loop", self.k)?;
        }
        let width = self.props.keys().chain(self.vars.keys()).map(String::len).max().unwrap_or(0).max(7);
        let lo = self.vars.values().map(|v| v.start).min().unwrap_or(0).min(0);
        let hi = self.vars.values().map(VarValues::end).max().unwrap_or(0).max(self.k as i64);
        write!(f, "{:width$} |", "instant")?;
        for t in lo..=hi {
            write!(f, " {t:>4}")?;
        }
        writeln!(f)?;
        for (p, vals) in &self.props {
            write!(f, "{p:width$} |")?;
            for t in lo..=hi {
                let cell = usize::try_from(t)
                    .ok()
                    .filter(|&t| t <= self.k)
                    .map(|t| if vals[t] { "T" } else { "." })
                    .unwrap_or("");
                write!(f, " {cell:>4}")?;
            }
            writeln!(f)?;
        }
        for (x, vals) in &self.vars {
            write!(f, "{x:width$} |")?;
            for t in lo..=hi {
                match vals.get(t) {
                    Some(v) => write!(f, " {v:>4}")?,
                    None => write!(f, " {:>4}", "")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Restriction on the loop position of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopShape {
    #[default]
    Any,
    Acyclic,
    Lasso,
}

impl LoopShape {
    pub fn loops(self, k: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            LoopShape::Any => 0..=k,
            LoopShape::Acyclic => 0..=0,
            LoopShape::Lasso => 1..=k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_tail_follows_loop() {
        let t = Trace::new(2, 1).with_prop("p", &[true, false, true]);
        assert_eq!(t.props["p"], vec![true, false, true, false]);
        t.validate().unwrap();
        let bad = Trace::new(2, 2).with_prop("p", &[true, false, true]);
        assert!(matches!(bad.validate(), Err(TraceError::LoopLabel { .. })));
        let acyclic = Trace::new(1, 0).with_prop("p", &[true, true]);
        assert_eq!(acyclic.props["p"], vec![true, true, false]);
        acyclic.validate().unwrap();
    }

    #[test]
    fn var_window_lookup() {
        let t = Trace::new(2, 0).with_var("x", -1, &[7, 0, 1, 2]);
        assert_eq!(t.var("x", -1), Some(7));
        assert_eq!(t.var("x", 2), Some(2));
        assert_eq!(t.var("x", 3), None);
        assert_eq!(t.var("x", -2), None);
    }

    #[test]
    fn json_shape() {
        let t = Trace::new(1, 0).with_prop("p", &[true, false]).with_var("x", 0, &[3, 4]);
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["loop"], 0);
        assert_eq!(json["vars"]["x"]["values"][1], 4);
        let back: Trace = serde_json::from_value(json).unwrap();
        assert_eq!(back, t);
    }
}
