use std::path::PathBuf;
use std::process::{Command, Output};

fn ex(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../ex").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cltlb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn contradiction_exits_unsat() {
    let o = run(&["sat", ex("contradiction.cltl").to_str().unwrap(), "-k", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "unsat");
}

#[test]
fn counter_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = run(&["sat", ex("counter.cltl").to_str().unwrap(), "-k", "4", "--trace-out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let trace: cltlb::trace::Trace = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    for i in 0..=4 {
        assert_eq!(trace.var("x", i), Some(i));
    }
}

#[test]
fn emit_smt_writes_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.smt2");
    let o = run(&["sat", ex("fp.cltl").to_str().unwrap(), "-k", "2", "--emit-smt", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let script = std::fs::read_to_string(out).unwrap();
    assert!(script.contains("(check-sat)"));
    assert!(script.contains("(declare-fun loop () Int)"));
}

#[test]
fn json_report() {
    let o = run(&["sat", ex("fp.cltl").to_str().unwrap(), "-k", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "sat");
    assert_eq!(v["k"], 2);
}

#[test]
fn unreachable_solver_is_an_error() {
    let o = run(&["sat", ex("fp.cltl").to_str().unwrap(), "-k", "2", "--solver", "/nonexistent/solver"]);
    assert!(o.status.code().unwrap() > 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot start"));
}

#[test]
fn parse_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.cltl");
    std::fs::write(&f, "prop p;\np & q\n").unwrap();
    let o = run(&["sat", f.to_str().unwrap(), "-k", "1"]);
    assert!(o.status.code().unwrap() > 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("q"));
}

#[test]
fn case_study() {
    let o = run(&["subst", ex("lyrics.json").to_str().unwrap(), "--sequence", "checkSongExists,searchSongs,getSong"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("actual operations: SearchLyric, GetLyric"));
    let o = run(&[
        "subst",
        ex("lyrics.json").to_str().unwrap(),
        "--sequence",
        "checkSongExists,searchSongs,getSong",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "substitutable");
    assert_eq!(v["k"], 10);
}

#[test]
fn discard_counterexample() {
    let m = ex("discard_counterexample.json");
    let o = run(&["subst", m.to_str().unwrap(), "--sequence", "e1,e2", "--strategy", "discard"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["subst", m.to_str().unwrap(), "--sequence", "e1,e2", "--strategy", "store"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors() {
    let o = run(&["subst", ex("lyrics.json").to_str().unwrap(), "--sequence", "getSong", "--bound", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["subst", ex("lyrics.json").to_str().unwrap(), "--strategy", "keep"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn oracle_modes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("zp.cltl");
    std::fs::write(&f, "prop p;\nZ p\n").unwrap();
    let t = dir.path().join("t.json");
    std::fs::write(&t, r#"{"k": 2, "loop": 0, "props": {"p": [false, false, false, false]}, "vars": {}}"#).unwrap();
    let o = run(&["oracle", f.to_str().unwrap(), "--trace", t.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(0), "true".to_string()));

    let o = run(&["oracle", ex("contradiction.cltl").to_str().unwrap(), "--enumerate", "0", "0", "-k", "2"]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(1), "unsat-within-range".to_string()));

    let o = run(&["oracle", ex("fp.cltl").to_str().unwrap(), "--enumerate", "0", "0", "-k", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["trace"]["props"]["p"], serde_json::json!([true, false, false]));

    let o =
        run(&["oracle", ex("counter.cltl").to_str().unwrap(), "--enumerate", "-3", "3", "-k", "4", "--budget", "3"]);
    assert!(o.status.code().unwrap() > 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}
