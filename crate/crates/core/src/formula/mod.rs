//! Abstract syntax of temporal formulae with past operators and
//! difference-logic atoms over integer variables.
//!
//! Arithmetic temporal terms are a single variable shifted in time by a net
//! number of `X` (next) and `Y` (previous) applications. Atoms compare two
//! such terms up to an integer shift. Constants are expressed against the
//! distinguished variable [`ZERO`], which is zero at every instant.

mod parse;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

pub use parse::{parse, parse_document, Document, ParseError};

/// Name of the distinguished variable that is `0` at every instant.
pub const ZERO: &str = "ZERO";

/// A variable read at a fixed offset from the current instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub var: String,
    /// Net count of `X` minus `Y` applications; this is the term's depth.
    pub offset: i32,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term { var: name.into(), offset: 0 }
    }

    pub fn zero() -> Self {
        Term::var(ZERO)
    }

    pub fn shifted(mut self, by: i32) -> Self {
        self.offset += by;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.var == ZERO
    }

    pub fn depth(&self) -> i32 {
        self.offset
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.offset >= 0 { "X " } else { "Y " };
        for _ in 0..self.offset.unsigned_abs() {
            f.write_str(op)?;
        }
        f.write_str(&self.var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }
}

/// `left rel right + shift`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub left: Term,
    pub rel: Rel,
    pub right: Term,
    pub shift: i64,
}

/// Boolean combination of the two primitive difference-logic relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DlPrim {
    /// `left < right + d`
    Less(Term, Term, i64),
    /// `left = right`
    Equal(Term, Term),
    Not(Box<DlPrim>),
    And(Box<DlPrim>, Box<DlPrim>),
    Or(Box<DlPrim>, Box<DlPrim>),
}

impl Atom {
    pub fn new(left: Term, rel: Rel, right: Term, shift: i64) -> Self {
        Atom { left, rel, right, shift }
    }

    pub fn terms(&self) -> [&Term; 2] {
        [&self.left, &self.right]
    }

    /// Rewrites the atom over the primitives `<_d` and `=`.
    pub fn desugar(&self) -> DlPrim {
        let (l, r, d) = (self.left.clone(), self.right.clone(), self.shift);
        let less = || DlPrim::Less(l.clone(), r.clone(), d);
        let equal = || {
            if d == 0 {
                DlPrim::Equal(l.clone(), r.clone())
            } else {
                // l = r + d  <=>  r < l + (1 - d)  and  l < r + (d + 1)
                DlPrim::And(
                    Box::new(DlPrim::Less(r.clone(), l.clone(), 1 - d)),
                    Box::new(DlPrim::Less(l.clone(), r.clone(), d + 1)),
                )
            }
        };
        match self.rel {
            Rel::Lt => less(),
            Rel::Le => DlPrim::Or(Box::new(less()), Box::new(equal())),
            Rel::Eq => equal(),
            Rel::Ge => DlPrim::Not(Box::new(less())),
            Rel::Gt => DlPrim::Not(Box::new(DlPrim::Or(Box::new(less()), Box::new(equal())))),
        }
    }

    /// Positive formula equivalent to the negation of this atom.
    pub fn negate(&self) -> Formula {
        let with = |rel| Formula::Atom(Atom { rel, ..self.clone() });
        match self.rel {
            Rel::Lt => with(Rel::Ge),
            Rel::Le => with(Rel::Gt),
            Rel::Ge => with(Rel::Lt),
            Rel::Gt => with(Rel::Le),
            Rel::Eq => Formula::or(with(Rel::Lt), with(Rel::Gt)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.left.is_zero() && self.left.offset == 0 {
            f.write_str("0")?;
        } else {
            write!(f, "{}", self.left)?;
        }
        write!(f, " {} ", self.rel.symbol())?;
        if self.right.is_zero() && self.right.offset == 0 {
            write!(f, "{}", self.shift)
        } else {
            write!(f, "{}", self.right)?;
            match self.shift {
                0 => Ok(()),
                s if s < 0 => write!(f, " - {}", s.unsigned_abs()),
                s => write!(f, " + {s}"),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Yesterday(Box<Formula>),
    WeakYesterday(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Trigger(Box<Formula>, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Prop(name.into())
    }

    pub fn atom(left: Term, rel: Rel, right: Term, shift: i64) -> Self {
        Formula::Atom(Atom::new(left, rel, right, shift))
    }

    /// `term rel c` for an integer constant `c`.
    pub fn cmp_const(term: Term, rel: Rel, c: i64) -> Self {
        Formula::atom(term, rel, Term::zero(), c)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    pub fn next(f: Formula) -> Self {
        Next(Box::new(f))
    }

    pub fn yesterday(f: Formula) -> Self {
        Yesterday(Box::new(f))
    }

    pub fn weak_yesterday(f: Formula) -> Self {
        WeakYesterday(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Until(Box::new(a), Box::new(b))
    }

    pub fn since(a: Formula, b: Formula) -> Self {
        Since(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Release(Box::new(a), Box::new(b))
    }

    pub fn trigger(a: Formula, b: Formula) -> Self {
        Trigger(Box::new(a), Box::new(b))
    }

    /// `G f`, i.e. `false R f`.
    pub fn globally(f: Formula) -> Self {
        Formula::release(False, f)
    }

    /// `F f`, i.e. `true U f`.
    pub fn eventually(f: Formula) -> Self {
        Formula::until(True, f)
    }

    /// `H f`, i.e. `false T f`.
    pub fn historically(f: Formula) -> Self {
        Formula::trigger(False, f)
    }

    /// `O f`, i.e. `true S f`.
    pub fn once(f: Formula) -> Self {
        Formula::since(True, f)
    }

    /// Balanced conjunction; `true` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        balanced(items.into_iter().collect(), Formula::and).unwrap_or(True)
    }

    /// Balanced disjunction; `false` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        balanced(items.into_iter().collect(), Formula::or).unwrap_or(False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            True | False | Prop(_) | Formula::Atom(_) => vec![],
            Not(a) | Next(a) | Yesterday(a) | WeakYesterday(a) => vec![a],
            And(a, b) | Or(a, b) | Until(a, b) | Since(a, b) | Release(a, b) | Trigger(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Number of AST nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn is_eventuality(&self) -> bool {
        matches!(self, Until(..) | Release(..))
    }

    pub fn is_past(&self) -> bool {
        matches!(self, Yesterday(_) | WeakYesterday(_) | Since(..) | Trigger(..))
    }

    /// True when negation only occurs directly above propositions.
    pub fn is_pnf(&self) -> bool {
        match self {
            Not(inner) => matches!(**inner, Prop(_)),
            other => other.children().into_iter().all(Formula::is_pnf),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    fn visit<'a>(&'a self, cb: &mut impl FnMut(&'a Formula)) {
        cb(self);
        for c in self.children() {
            c.visit(cb);
        }
    }

    /// Distinct arithmetic temporal terms, `ZERO` excluded, in sorted order.
    pub fn terms(&self) -> BTreeSet<Term> {
        self.atoms().into_iter().flat_map(|a| a.terms()).filter(|t| !t.is_zero()).cloned().collect()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms().into_iter().map(|t| t.var).collect()
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }
}

fn balanced(mut items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    match items.len() {
        0 => None,
        1 => items.pop(),
        n => {
            let right = items.split_off(n / 2);
            Some(join(balanced(items, join)?, balanced(right, join)?))
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Prop(p) => f.write_str(p),
            Formula::Atom(a) => write!(f, "({a})"),
            Not(a) => write!(f, "!{a}"),
            Next(a) => write!(f, "X {a}"),
            Yesterday(a) => write!(f, "Y {a}"),
            WeakYesterday(a) => write!(f, "Z {a}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Since(a, b) => write!(f, "({a} S {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
            Trigger(a, b) => write!(f, "({a} T {b})"),
        }
    }
}

/// Renders a complete formula file, declarations included.
pub fn print_document(f: &Formula) -> String {
    let mut out = String::new();
    let vars = f.variables();
    if !vars.is_empty() {
        out.push_str(&format!("var {};\n", vars.into_iter().collect::<Vec<_>>().join(", ")));
    }
    let props = f.propositions();
    if !props.is_empty() {
        out.push_str(&format!("prop {};\n", props.into_iter().collect::<Vec<_>>().join(", ")));
    }
    out.push_str(&f.to_string());
    out.push('\n');
    out
}

/// Pushes negations down to propositions using the temporal dualities,
/// De Morgan's laws and the complement table of the atom relations.
pub fn to_pnf(f: &Formula) -> Formula {
    pnf(f, false)
}

fn pnf(f: &Formula, neg: bool) -> Formula {
    let bin =
        |a: &Formula, b: &Formula, pos: fn(Formula, Formula) -> Formula, dual: fn(Formula, Formula) -> Formula| {
            let ctor = if neg { dual } else { pos };
            ctor(pnf(a, neg), pnf(b, neg))
        };
    match f {
        True if neg => False,
        False if neg => True,
        True | False => f.clone(),
        Prop(_) if neg => Formula::not(f.clone()),
        Prop(_) => f.clone(),
        Formula::Atom(a) if neg => a.negate(),
        Formula::Atom(_) => f.clone(),
        Not(a) => pnf(a, !neg),
        And(a, b) => bin(a, b, Formula::and, Formula::or),
        Or(a, b) => bin(a, b, Formula::or, Formula::and),
        Next(a) => Formula::next(pnf(a, neg)),
        Yesterday(a) if neg => Formula::weak_yesterday(pnf(a, true)),
        Yesterday(a) => Formula::yesterday(pnf(a, false)),
        WeakYesterday(a) if neg => Formula::yesterday(pnf(a, true)),
        WeakYesterday(a) => Formula::weak_yesterday(pnf(a, false)),
        Until(a, b) => bin(a, b, Formula::until, Formula::release),
        Release(a, b) => bin(a, b, Formula::release, Formula::until),
        Since(a, b) => bin(a, b, Formula::since, Formula::trigger),
        Trigger(a, b) => bin(a, b, Formula::trigger, Formula::since),
    }
}

/// Distinct subformulae in post-order of first occurrence. Structurally
/// equal subtrees are one subformula.
pub fn subformulas(f: &Formula) -> Vec<&Formula> {
    fn walk<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
        if seen.contains(f) {
            return;
        }
        for c in f.children() {
            walk(c, seen, out);
        }
        seen.insert(f);
        out.push(f);
    }
    let mut out = Vec::new();
    walk(f, &mut HashSet::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaInfo {
    /// Minimum term depth, never above zero.
    pub min_depth: i32,
    /// Maximum term depth, never below zero.
    pub max_depth: i32,
    /// Distinct subformulae.
    pub m: usize,
    /// Distinct until/release subformulae.
    pub n: usize,
    pub variables: BTreeSet<String>,
    pub propositions: BTreeSet<String>,
}

pub fn analyze(f: &Formula) -> FormulaInfo {
    let subs = subformulas(f);
    let terms = f.terms();
    FormulaInfo {
        min_depth: terms.iter().map(Term::depth).min().unwrap_or(0).min(0),
        max_depth: terms.iter().map(Term::depth).max().unwrap_or(0).max(0),
        m: subs.len(),
        n: subs.iter().filter(|s| s.is_eventuality()).count(),
        variables: f.variables(),
        propositions: f.propositions(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    #[test]
    fn pnf_dualities() {
        let f = Formula::not(Formula::until(p("p"), p("q")));
        assert_eq!(to_pnf(&f), Formula::release(Formula::not(p("p")), Formula::not(p("q"))));
        assert_eq!(to_pnf(&Formula::not(Formula::not(p("p")))), p("p"));
        let y = Formula::not(Formula::yesterday(p("p")));
        assert_eq!(to_pnf(&y), Formula::weak_yesterday(Formula::not(p("p"))));
        let z = Formula::not(Formula::weak_yesterday(p("p")));
        assert_eq!(to_pnf(&z), Formula::yesterday(Formula::not(p("p"))));
        let s = Formula::not(Formula::since(p("p"), p("q")));
        assert_eq!(to_pnf(&s), Formula::trigger(Formula::not(p("p")), Formula::not(p("q"))));
    }

    #[test]
    fn negated_atoms_flip_relation() {
        let lt = Formula::atom(Term::var("x"), Rel::Lt, Term::var("y"), 0);
        let ge = Formula::atom(Term::var("x"), Rel::Ge, Term::var("y"), 0);
        assert_eq!(to_pnf(&Formula::not(lt)), ge);
        let eq = Formula::atom(Term::var("x"), Rel::Eq, Term::var("y"), 2);
        let got = to_pnf(&Formula::not(eq));
        assert_eq!(
            got,
            Formula::or(
                Formula::atom(Term::var("x"), Rel::Lt, Term::var("y"), 2),
                Formula::atom(Term::var("x"), Rel::Gt, Term::var("y"), 2)
            )
        );
        assert!(got.is_pnf());
    }

    #[test]
    fn depths() {
        let f = Formula::atom(Term::var("x").shifted(2), Rel::Eq, Term::var("y"), 0);
        let info = analyze(&f);
        assert_eq!((info.min_depth, info.max_depth), (0, 2));
        let g = Formula::atom(Term::var("x").shifted(-1), Rel::Lt, Term::var("y").shifted(1), 0);
        let info = analyze(&g);
        assert_eq!((info.min_depth, info.max_depth), (-1, 1));
        let none = analyze(&p("p"));
        assert_eq!((none.min_depth, none.max_depth), (0, 0));
    }

    #[test]
    fn counts_share_structure() {
        let f = Formula::until(p("p"), p("q"));
        let info = analyze(&f);
        assert_eq!((info.m, info.n), (3, 1));
        let g = Formula::and(f.clone(), f);
        let info = analyze(&g);
        assert_eq!((info.m, info.n), (4, 1));
    }

    fn prim_holds(p: &DlPrim, val: &dyn Fn(&Term) -> i64) -> bool {
        match p {
            DlPrim::Less(l, r, d) => val(l) < val(r) + d,
            DlPrim::Equal(l, r) => val(l) == val(r),
            DlPrim::Not(a) => !prim_holds(a, val),
            DlPrim::And(a, b) => prim_holds(a, val) && prim_holds(b, val),
            DlPrim::Or(a, b) => prim_holds(a, val) || prim_holds(b, val),
        }
    }

    #[test]
    fn desugaring_matches_relations() {
        let rels = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt];
        for rel in rels {
            for d in -3..=3 {
                let a = Atom::new(Term::var("x"), rel, Term::var("y"), d);
                let prim = a.desugar();
                for x in -4..=4 {
                    for y in -4..=4 {
                        let val = |t: &Term| if t.var == "x" { x } else { y };
                        assert_eq!(prim_holds(&prim, &val), rel.holds(x, y + d), "{a} at x={x} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn balanced_conjunction_is_shallow() {
        let f = Formula::and_all((0..1024).map(|i| Formula::prop(format!("p{i}"))));
        fn depth(f: &Formula) -> usize {
            1 + f.children().into_iter().map(depth).max().unwrap_or(0)
        }
        assert_eq!(depth(&f), 11);
        assert_eq!(Formula::and_all(vec![]), True);
    }
}
