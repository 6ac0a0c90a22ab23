use std::path::PathBuf;
use std::process::{Command, Output};

use nodice::checker::{infer, InferOptions, Query};
use nodice::frontend::compile_source;
use nodice::lang::Value;
use nodice::mdp::{load_explicit_mdp, write_explicit};

fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(format!("{name}.nd"))
}

fn nodice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodice")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(name: &str) -> String {
    program(name).display().to_string()
}

#[test]
fn runway_single_value() {
    let o = nodice(&["infer", &p("runway"), "--value", "true"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("true: 0.036"), "{out}");
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn all_values() {
    let o = nodice(&["infer", &p("choice_second"), "--all"]);
    assert_eq!(stdout(&o), "true: 1.000000\nfalse: 1.000000\n");
    let o = nodice(&["infer", &p("pair_output"), "--all", "--method", "both", "--parallel"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn usage_errors_exit_one() {
    let o = nodice(&["infer", &p("pipeline"), "--value", "(true, true)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not have"));
    for args in [
        vec!["infer", "--bogus"],
        vec!["infer", "missing.nd", "--all"],
        vec!["infer", "x.nd"],
        vec!["infer", "x.nd", "--all", "--value", "true"],
        vec!["infer", "x.nd", "--all", "--method", "fastest"],
    ] {
        assert_eq!(nodice(&args).status.code(), Some(1), "{args:?}");
    }
    let pipeline = p("pipeline");
    assert_eq!(nodice(&["infer", &pipeline, "--all", "--tol", "0"]).status.code(), Some(1));
    assert_eq!(nodice(&["infer", &pipeline, "--all", "--max-fanout", "1"]).status.code(), Some(1));
    assert_eq!(nodice(&["--help"]).status.code(), Some(0));
}

#[test]
fn analysis_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.nd");
    std::fs::write(&bad, "let x = in x").unwrap();
    assert_eq!(nodice(&["infer", bad.to_str().unwrap(), "--all"]).status.code(), Some(2));
    let rows = dir.path().join("rows.mdp");
    std::fs::write(&rows, "STATES 2\nINITIAL 0\nTRANS 0 d 1 0.8\nTRANS 1 d 1 1\n").unwrap();
    let o = nodice(&["check-mdp", rows.to_str().unwrap(), "--value", "true"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let init = dir.path().join("init.mdp");
    std::fs::write(&init, "STATES 2\nINITIAL 99\n").unwrap();
    assert_eq!(nodice(&["check-mdp", init.to_str().unwrap(), "--value", "true"]).status.code(), Some(2));
}

#[test]
fn stats_line() {
    let o = nodice(&["infer", &p("pipeline"), "--value", "true", "--stats", "--oracle"]);
    let out = stdout(&o);
    assert!(out.contains("add_nodes=7 mdp_states_pre=7"), "{out}");
    assert!(out.contains("oracle=1/5"), "{out}");
}

fn without_times(doc: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(doc).unwrap();
    for r in v.as_array_mut().unwrap() {
        r.as_object_mut().unwrap().remove("times");
    }
    v
}

#[test]
fn json_is_parseable_and_deterministic() {
    let args = ["infer", &p("pair_output"), "--all", "--json", "--stats"];
    let a = stdout(&nodice(&args));
    let b = stdout(&nodice(&args));
    let doc = without_times(&a);
    assert_eq!(doc, without_times(&b));
    let records = doc.as_array().unwrap();
    assert_eq!(records.len(), 4);
    for key in ["value", "probability", "method", "iterations", "add_nodes", "mdp_states_pre", "mdp_states_post"] {
        assert!(records[0].get(key).is_some(), "{key}");
    }
    assert!(serde_json::from_str::<serde_json::Value>(&a).unwrap()[0].get("times").is_some());
}

#[test]
fn export_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pipeline.mdp");
    let o = nodice(&["infer", &p("pipeline"), "--value", "true", "--export-mdp", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let m = load_explicit_mdp(&text).unwrap();
    assert_eq!(write_explicit(&m), text);
    let checked = nodice(&["check-mdp", path.to_str().unwrap(), "--value", "true"]);
    assert_eq!(stdout(&checked), stdout(&o));
    let src = std::fs::read_to_string(program("pipeline")).unwrap();
    let direct = infer(&compile_source(&src).unwrap(), &Query::Value(Value::T), &InferOptions::default()).unwrap();
    assert!(stdout(&checked).starts_with(&format!("true: {:.6}", direct.values[0].probability)));
}

#[test]
fn export_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m");
    let o = nodice(&["infer", &p("pair_output"), "--all", "--export-mdp", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for i in 0..4 {
        assert!(dir.path().join(format!("m.{i}")).exists());
    }
}

#[test]
fn bench_subcommand() {
    let o = nodice(&["bench", "runway", "3", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("runway-3") && out.contains("runway-4"), "{out}");
    let o = nodice(&["bench", "threesat", "6", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let o = nodice(&["bench", "runway", "3", "--emit"]);
    assert!(stdout(&o).contains("fun step"));
    let o = nodice(&["bench", "network", "2", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
}

#[test]
fn in_process_runner() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = nodice::cli::run(["nodice", "infer", &p("choice_observed"), "--all"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "true: 1.000000\nfalse: 0.333333\n");
}
