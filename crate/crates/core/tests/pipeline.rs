mod common;

use cltlb::encoder::{assemble, EncodeOptions};
use cltlb::formula::{parse, to_pnf, Formula};
use cltlb::oracle::{self, EnumConfig, Enumeration, LoopShape};
use cltlb::smt::{check_sat, emit_smtlib, run_solver, SolverConfig, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pnf(src: &str) -> Formula {
    to_pnf(&parse(src).unwrap())
}

fn cfg() -> SolverConfig {
    SolverConfig::from_env()
}

#[test]
fn trivial_scripts() {
    let run = run_solver("(set-logic QF_UFLIA)\n(assert true)\n(check-sat)\n", &cfg());
    assert_eq!(run.status, Status::Sat, "{}", run.diagnostics);
    let run = run_solver("(set-logic QF_UFLIA)\n(assert false)\n(check-sat)\n(get-model)\n", &cfg());
    assert_eq!(run.status, Status::Unsat, "{}", run.diagnostics);
    assert!(run.model.is_none());
}

#[test]
fn atomic_root_is_true_at_zero() {
    let v = check_sat(&pnf("prop p; p"), 1, &EncodeOptions::default(), &cfg()).unwrap();
    assert_eq!(v.status, Status::Sat, "{}", v.diagnostics);
    assert!(v.trace.unwrap().props["p"][0]);
}

#[test]
fn contradiction_is_unsat_for_every_bound() {
    for k in 1..=4 {
        let v = check_sat(&pnf("prop p; p & !p"), k, &EncodeOptions::default(), &cfg()).unwrap();
        assert_eq!(v.status, Status::Unsat);
        assert!(v.trace.is_none());
    }
}

#[test]
fn counter_reaches_bound() {
    let f = pnf("var x; x = 0 & G (X x = x + 1)");
    let (cs, meta) = assemble(&f, 4, &EncodeOptions::default()).unwrap();
    let script = emit_smtlib(&cs, &cfg().logic);
    let v = cltlb::smt::solve_script(&script, &meta, &cfg());
    assert_eq!(v.status, Status::Sat, "{}", v.diagnostics);
    let t = v.trace.unwrap();
    for i in 0..=4 {
        assert_eq!(t.var("x", i), Some(i));
    }
    assert!(oracle::satisfies(&f, &t).unwrap());
}

#[test]
fn eventuality_witness_lies_in_the_loop() {
    let f = pnf("prop p; G F p & G (p -> X !p)");
    let opts = EncodeOptions { shape: LoopShape::Lasso, ..Default::default() };
    let v = check_sat(&f, 2, &opts, &cfg()).unwrap();
    assert_eq!(v.status, Status::Sat, "{}", v.diagnostics);
    let t = v.trace.unwrap();
    assert!(oracle::satisfies(&f, &t).unwrap(), "{t}");
    let l = t.loop_at;
    assert!((l..=2).any(|i| t.props["p"][i]), "{t}");
}

#[test]
fn pinned_initial_values() {
    let f = pnf("var x; Y x = x");
    let mut opts = EncodeOptions::default();
    opts.init.insert("x".into(), [(-1, 9)].into());
    let v = check_sat(&f, 1, &opts, &cfg()).unwrap();
    let t = v.trace.unwrap();
    assert_eq!(t.var("x", -1), Some(9));
    assert_eq!(t.var("x", 0), Some(9));
}

#[test]
fn pinned_labels() {
    let f = pnf("prop p; F p");
    let mut opts = EncodeOptions::default();
    opts.labels.insert("p".into(), vec![false, false]);
    opts.shape = LoopShape::Acyclic;
    let v = check_sat(&f, 1, &opts, &cfg()).unwrap();
    assert_eq!(v.status, Status::Unsat);
    opts.labels.insert("p".into(), vec![false, true]);
    let v = check_sat(&f, 1, &opts, &cfg()).unwrap();
    assert_eq!(v.status, Status::Sat);
}

#[test]
fn agrees_with_enumeration_on_samples() {
    let cases = [
        "prop p; G p & F !p",
        "prop p, q; (p U q) & G !q",
        "prop p, q; G (p R q)",
        "prop p; X X p & H (!p)",
        "prop p; G ((p -> !Y p) & (!Y p -> p)) & F (p & Y p)",
        "var x; G (X x > x) & F (x < 0) & x = 0",
        "var x, y; G (x < y) & F (Y y = x)",
        "prop p; !p & (p T p)",
        "prop p; G (Z p) & O !p",
        "var x; x = 2 & X (x = Y x + 1) & G (x <= 3)",
    ];
    for src in cases {
        let f = pnf(src);
        for k in 1..=3 {
            let opts = EncodeOptions { int_range: Some((-3, 3)), ..Default::default() };
            let v = check_sat(&f, k, &opts, &cfg()).unwrap();
            let e = oracle::enumerate(&f, k, -3, 3, EnumConfig::default()).unwrap();
            let expected = matches!(e, Enumeration::Sat(_));
            assert_eq!(v.status == Status::Sat, expected, "{src} k={k}: {}", v.diagnostics);
            if let Some(t) = v.trace {
                assert!(oracle::satisfies(&f, &t).unwrap(), "{src} k={k}\n{t}");
            }
        }
    }
}

/// A propositional model of length k unrolls into one of length k + 1, so a
/// sat verdict must survive a larger bound.
#[test]
fn propositional_verdicts_are_monotone_in_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 40 {
        let f = common::pnf_formula(&mut rng, 9);
        if !f.variables().is_empty() {
            continue;
        }
        checked += 1;
        let k = rng.gen_range(1..=4);
        let at = |k| check_sat(&f, k, &EncodeOptions::default(), &cfg()).unwrap().status;
        if at(k) == Status::Sat {
            assert_eq!(at(k + 1), Status::Sat, "{f} sat at {k} but not at {}", k + 1);
        }
    }
}
