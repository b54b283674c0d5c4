#![allow(dead_code)]

use cltlb::formula::{Formula, Rel, Term};
use rand::Rng;

pub const PROPS: [&str; 2] = ["p", "q"];
pub const VARS: [&str; 2] = ["x", "y"];

fn term(rng: &mut impl Rng) -> Term {
    let offset = rng.gen_range(-1..=1);
    Term::var(VARS[rng.gen_range(0..VARS.len())]).shifted(offset)
}

fn rel(rng: &mut impl Rng) -> Rel {
    [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt][rng.gen_range(0..5)]
}

fn leaf(rng: &mut impl Rng) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        2..=4 => Formula::prop(PROPS[rng.gen_range(0..PROPS.len())]),
        5 => Formula::not(Formula::prop(PROPS[rng.gen_range(0..PROPS.len())])),
        6 | 7 => Formula::cmp_const(term(rng), rel(rng), rng.gen_range(-3..=3)),
        _ => Formula::atom(term(rng), rel(rng), term(rng), rng.gen_range(-2..=2)),
    }
}

/// A random PNF formula with at most `budget` AST nodes.
pub fn pnf_formula(rng: &mut impl Rng, budget: usize) -> Formula {
    if budget <= 2 || rng.gen_bool(0.2) {
        let f = leaf(rng);
        if f.size() <= budget {
            return f;
        }
        return Formula::prop(PROPS[rng.gen_range(0..PROPS.len())]);
    }
    if budget >= 3 && rng.gen_bool(0.6) {
        let left_budget = rng.gen_range(1..=budget - 2);
        let a = pnf_formula(rng, left_budget);
        let b = pnf_formula(rng, budget - 1 - a.size());
        return match rng.gen_range(0..8) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            2 => Formula::until(a, b),
            3 => Formula::release(a, b),
            4 => Formula::since(a, b),
            5 => Formula::trigger(a, b),
            6 => Formula::and(a, b),
            _ => Formula::or(a, b),
        };
    }
    let a = pnf_formula(rng, budget - 1);
    match rng.gen_range(0..3) {
        0 => Formula::next(a),
        1 => Formula::yesterday(a),
        _ => Formula::weak_yesterday(a),
    }
}
