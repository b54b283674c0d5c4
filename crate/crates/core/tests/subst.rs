use std::path::Path;
use std::time::Instant;

use cltlb::smt::SolverConfig;
use cltlb::subst::{check_substitutable, replay, Outcome, ServiceModel, Strategy, SubstOptions};

fn load(name: &str) -> ServiceModel {
    ServiceModel::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../ex").join(name)).unwrap()
}

fn seq(ops: &[&str]) -> Vec<String> {
    ops.iter().map(|s| s.to_string()).collect()
}

#[test]
fn case_study_store() {
    let model = load("lyrics.json");
    let s = seq(&["checkSongExists", "searchSongs", "getSong"]);
    let t0 = Instant::now();
    let opts = SubstOptions { strategy: Strategy::Store, k: None, minimize: true };
    let report = check_substitutable(&model, &s, &opts, &SolverConfig::from_env()).unwrap();
    println!("k = {}, {} solver calls, {:?}", report.k, report.solver_calls, t0.elapsed());
    assert_eq!(report.k, 10);
    let Outcome::Substitutable(script) = report.outcome else { panic!("{:?}", report.outcome) };
    println!("{script}");
    assert_eq!(script.actual_ops(), vec!["SearchLyric", "GetLyric"]);
    replay(&script, &model, &s).unwrap();
    let last = script.final_step();
    assert_eq!((last.expected_state.as_str(), last.actual_state.as_str()), ("s6", "end"));
    assert_eq!(last.counters["needed(artistUrl)"], -1);
    assert_eq!(last.counters["needed(lyricRank)"], -1);
}

#[test]
fn discard_loses_data_a_later_request_needs() {
    let model = load("discard_counterexample.json");
    let s = seq(&["e1", "e2"]);
    let cfg = SolverConfig::from_env();
    let store = SubstOptions { strategy: Strategy::Store, ..Default::default() };
    let report = check_substitutable(&model, &s, &store, &cfg).unwrap();
    let Outcome::Substitutable(script) = report.outcome else { panic!("{:?}", report.outcome) };
    assert_eq!(script.actual_ops(), vec!["A1"]);
    replay(&script, &model, &s).unwrap();
    let discard = SubstOptions { strategy: Strategy::Discard, ..Default::default() };
    let report = check_substitutable(&model, &s, &discard, &cfg).unwrap();
    assert_eq!(report.outcome, Outcome::NotSubstitutable);
    // Larger bounds do not help: the actual service has nothing left to offer.
    let discard = SubstOptions { strategy: Strategy::Discard, k: Some(12), ..Default::default() };
    assert_eq!(check_substitutable(&model, &s, &discard, &cfg).unwrap().outcome, Outcome::NotSubstitutable);
}

#[test]
fn empty_sequence_needs_compatible_initial_states() {
    let mut model = load("lyrics.json");
    let cfg = SolverConfig::from_env();
    let report = check_substitutable(&model, &[], &SubstOptions::default(), &cfg).unwrap();
    let Outcome::Substitutable(script) = report.outcome else { panic!("{:?}", report.outcome) };
    assert_eq!(script.steps.len(), 1);
    assert!(script.steps[0].counters.values().all(|&v| v == 0));
    model.compatibility.states.retain(|(e, _)| e != "start");
    let report = check_substitutable(&model, &[], &SubstOptions::default(), &cfg).unwrap();
    assert_eq!(report.outcome, Outcome::NotSubstitutable);
}

#[test]
fn no_compatible_final_states() {
    let mut model = load("lyrics.json");
    model.compatibility.states.retain(|(e, _)| e != "s6");
    let s = seq(&["checkSongExists", "searchSongs", "getSong"]);
    let report = check_substitutable(&model, &s, &SubstOptions::default(), &SolverConfig::from_env()).unwrap();
    assert_eq!(report.outcome, Outcome::NotSubstitutable);
}

#[test]
fn discard_is_never_more_permissive_than_store() {
    let model = load("lyrics.json");
    let cfg = SolverConfig::from_env();
    let seqs = [
        seq(&["checkSongExists"]),
        seq(&["searchSongs"]),
        seq(&["checkSongExists", "searchSongs"]),
        seq(&["checkSongExists", "searchSongs", "getSong"]),
        seq(&["searchSongs", "checkSongExists", "getSong"]),
        seq(&["checkSongExists", "searchArtists"]),
    ];
    for s in &seqs {
        let k = Some(8);
        let d = SubstOptions { strategy: Strategy::Discard, k, minimize: false };
        let st = SubstOptions { strategy: Strategy::Store, k, minimize: false };
        let d = check_substitutable(&model, s, &d, &cfg).unwrap().outcome;
        let st = check_substitutable(&model, s, &st, &cfg).unwrap().outcome;
        if let Outcome::Substitutable(script) = &d {
            replay(script, &model, s).unwrap();
            assert!(matches!(st, Outcome::Substitutable(_)), "{s:?}");
        }
        if let Outcome::Substitutable(script) = &st {
            replay(script, &model, s).unwrap();
        }
    }
}
