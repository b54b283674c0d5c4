use cltlb::encoder::{assemble, EncodeOptions};
use cltlb::formula::{analyze, parse, print_document, to_pnf, Formula, Rel, Term};
use cltlb::oracle;
use cltlb::smt::emit_smtlib;
use cltlb::trace::Trace;
use proptest::prelude::*;

fn term() -> impl Strategy<Value = Term> {
    (prop::sample::select(vec!["x", "y"]), -2i32..=2).prop_map(|(v, o)| Term::var(v).shifted(o))
}

fn rel() -> impl Strategy<Value = Rel> {
    prop::sample::select(vec![Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt])
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        prop::sample::select(vec!["p", "q"]).prop_map(Formula::prop),
        (term(), rel(), term(), -3i64..=3).prop_map(|(l, r, t, s)| Formula::atom(l, r, t, s)),
        (term(), rel(), -3i64..=3).prop_map(|(t, r, c)| Formula::cmp_const(t, r, c)),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::yesterday),
            inner.clone().prop_map(Formula::weak_yesterday),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::release(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::since(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::trigger(a, b)),
        ]
    })
}

/// A well-formed lasso trace whose variable windows cover every offset in
/// `-2..=2`. Negation does not commute with `X` at the end of an acyclic
/// trace, so the laws below are stated for lassos only.
fn trace() -> impl Strategy<Value = Trace> {
    (1usize..=4).prop_flat_map(|k| {
        (
            1..=k,
            prop::collection::vec(any::<bool>(), k + 1),
            prop::collection::vec(any::<bool>(), k + 1),
            prop::collection::vec(-3i64..=3, k + 5),
            prop::collection::vec(-3i64..=3, k + 5),
        )
            .prop_map(move |(l, mut p, mut q, x, y)| {
                p[k] = p[l - 1];
                q[k] = q[l - 1];
                Trace::new(k, l).with_prop("p", &p).with_prop("q", &q).with_var("x", -2, &x).with_var("y", -2, &y)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(f in formula()) {
        let text = print_document(&f);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, f);
    }

    #[test]
    fn pnf_preserves_truth(f in formula(), t in trace()) {
        let g = to_pnf(&f);
        prop_assert!(g.is_pnf());
        prop_assert_eq!(oracle::eval_all(&f, &t).unwrap(), oracle::eval_all(&g, &t).unwrap());
    }

    #[test]
    fn until_release_duality(a in formula(), b in formula(), t in trace()) {
        let lhs = Formula::not(Formula::until(a.clone(), b.clone()));
        let rhs = Formula::release(Formula::not(a.clone()), Formula::not(b.clone()));
        prop_assert_eq!(oracle::eval_all(&lhs, &t).unwrap(), oracle::eval_all(&rhs, &t).unwrap());
        let lhs = Formula::not(Formula::since(a.clone(), b.clone()));
        let rhs = Formula::trigger(Formula::not(a), Formula::not(b));
        prop_assert_eq!(oracle::eval_all(&lhs, &t).unwrap(), oracle::eval_all(&rhs, &t).unwrap());
    }

    #[test]
    fn encoding_is_well_formed_and_sized(f in formula(), k in 1usize..=5) {
        let g = to_pnf(&f);
        let info = analyze(&g);
        let (cs, meta) = assemble(&g, k, &EncodeOptions::default()).unwrap();
        cs.check().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(cs.predicates.len(), info.m);
        prop_assert_eq!(cs.int_consts.len(), info.n + 1);
        prop_assert_eq!(meta.window, (i64::from(info.min_depth), k as i64 + i64::from(info.max_depth)));
        prop_assert_eq!(emit_smtlib(&cs, "QF_UFLIA"), emit_smtlib(&cs.clone(), "QF_UFLIA"));
    }
}
