//! Bounded satisfiability checking for linear temporal logic with past
//! operators and difference-logic constraints over integer variables.

pub mod encoder;
pub mod formula;
pub mod oracle;
pub mod smt;
pub mod subst;
pub mod trace;
