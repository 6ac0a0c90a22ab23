use super::*;
use crate::compiler::FlipKind;
use crate::frontend::compile_source;
use crate::lang::CoreProgram;

fn bundled(name: &str) -> CoreProgram {
    let path = format!("{}/../../programs/{name}.nd", env!("CARGO_MANIFEST_DIR"));
    compile_source(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn uncompressed() -> InferOptions {
    InferOptions { compress: false, ..Default::default() }
}

fn pipeline() -> Prepared {
    prepare(&bundled("pipeline"), &uncompressed()).unwrap()
}

fn close(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps
}

#[test]
fn unconditioned_reachability_on_pipeline() {
    let m = pipeline().mdp;
    assert!(close(max_reach_dag(&m, &Ap::Val(Value::T)).unwrap(), 0.116, 1e-12));
    assert!(close(max_reach_dag(&m, &Ap::R).unwrap(), 0.7, 1e-12));
    assert_eq!(max_reach_dag(&m, &Ap::Val(Value::pair(Value::T, Value::T))).unwrap(), 0.0);
    let single = prepare(&compile_source("true").unwrap(), &uncompressed()).unwrap().mdp;
    assert_eq!(max_reach_dag(&single, &Ap::Val(Value::T)).unwrap(), 1.0);
}

#[test]
fn weighted_values() {
    let m = pipeline().mdp;
    assert_eq!(weighted_terminal_value(&m, |_| 0.0).unwrap().0, 0.0);
    let (margin, _) = bisection_margin(&m, &Value::T, 0.15).unwrap();
    assert!(margin > 0.0);
    let (margin, _) = bisection_margin(&m, &Value::T, 0.25).unwrap();
    assert!(margin < 0.0);
}

#[test]
fn bisection_on_pipeline_picks_r() {
    let prep = pipeline();
    let b = conditional_bisection(&prep.mdp, &Value::T, 1e-6).unwrap();
    assert!(close(b.probability, 0.2, 1e-6), "{}", b.probability);
    let level = prep.trace.iter().find(|e| e.kind == FlipKind::Nondet).unwrap().level;
    assert_eq!(b.witness.actions_at_level(level), vec![Action::R]);
    let mut steps = b.steps.clone();
    steps.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(steps.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
}

#[test]
fn bisection_rejects_bad_tolerance() {
    let m = pipeline().mdp;
    assert!(matches!(conditional_bisection(&m, &Value::T, 0.0), Err(Error::Param(_))));
    assert!(matches!(conditional_restart(&m, &Value::T, -1.0), Err(Error::Param(_))));
}

#[test]
fn zero_condition_is_zero() {
    let p = compile_source("let o = observe false in true").unwrap();
    let r = infer(&p, &Query::Value(Value::T), &InferOptions { method: Method::Both, ..Default::default() }).unwrap();
    assert_eq!(r.values[0].probability, 0.0);
}

#[test]
fn worked_example_and_its_variant() {
    for (name, expected_action) in [("coin_choice", Action::R), ("coin_choice_biased", Action::L)] {
        let prep = prepare(&bundled(name), &InferOptions::default()).unwrap();
        let b = conditional_bisection(&prep.mdp, &Value::T, 1e-6).unwrap();
        let level = prep.trace.iter().find(|e| e.kind == FlipKind::Nondet).unwrap().level;
        assert_eq!(b.witness.actions_at_level(level), vec![expected_action], "{name}");
        if name == "coin_choice" {
            assert!(close(b.probability, 301.0 / 420.0, 1e-6), "{}", b.probability);
        }
    }
}

#[test]
fn restart_agrees_on_pipeline() {
    let m = pipeline().mdp;
    let r = conditional_restart(&m, &Value::T, 1e-6).unwrap();
    assert!(close(r.probability, 0.2, 2e-6), "{}", r.probability);
    let absent = conditional_restart(&m, &Value::pair(Value::T, Value::F), 1e-6).unwrap();
    assert_eq!(absent.probability, 0.0);
    let choice_observed = prepare(&bundled("choice_observed"), &uncompressed()).unwrap().mdp;
    assert!(close(conditional_restart(&choice_observed, &Value::T, 1e-6).unwrap().probability, 1.0, 2e-6));
}

#[test]
fn small_worked_examples() {
    let opts = InferOptions { method: Method::Both, ..Default::default() };
    let all = |name: &str| infer(&bundled(name), &Query::All, &opts).unwrap();
    let r = all("choice_first");
    assert!(close(r.probability("true").unwrap(), 2.0 / 3.0, 1e-6));
    let r = all("choice_second");
    assert!(close(r.probability("true").unwrap(), 1.0, 1e-6));
    assert!(close(r.probability("false").unwrap(), 1.0, 1e-6));
    let r = all("choice_observed");
    assert!(close(r.probability("true").unwrap(), 1.0, 1e-6));
    assert!(close(r.probability("false").unwrap(), 1.0 / 3.0, 1e-6));
    let r = infer(&bundled("runway"), &Query::Value(Value::T), &opts).unwrap();
    assert_eq!(format!("{:.1}", r.values[0].probability * 100.0), "3.6");
}

#[test]
fn pipeline_stats() {
    let r = infer(&bundled("pipeline"), &Query::Value(Value::T), &InferOptions::default()).unwrap();
    let s = &r.values[0].stats;
    assert_eq!((s.add_nodes, s.mdp_states_pre), (7, 7));
    assert!(s.mdp_states_post < 7);
}

#[test]
fn witness_is_valid_and_methods_agree_on_bundled() {
    let tol = 1e-6;
    for name in [
        "runway",
        "pipeline",
        "coin_choice",
        "coin_choice_biased",
        "choice_first",
        "choice_second",
        "choice_observed",
        "pair_output",
    ] {
        let p = bundled(name);
        let with = infer(&p, &Query::All, &InferOptions { method: Method::Both, ..Default::default() }).unwrap();
        let without = infer(&p, &Query::All, &InferOptions { method: Method::Both, ..uncompressed() }).unwrap();
        let mut total = 0.0;
        for (a, b) in with.values.iter().zip(&without.values) {
            assert!(close(a.probability, b.probability, 2.0 * tol), "{name} {}", a.value);
            assert!((0.0..=1.0).contains(&a.probability));
            total += a.probability;
        }
        assert!(total >= 1.0 - tol * with.values.len() as f64, "{name}");
        if *p.output_ty() == crate::lang::Ty::Bool {
            let prep = prepare(&p, &InferOptions::default()).unwrap();
            let b = conditional_bisection(&prep.mdp, &Value::T, tol).unwrap();
            let (num, den) = evaluate_scheduler(&prep.mdp, &b.witness, &Value::T).unwrap();
            let ratio = if den > 0.0 { num / den } else { 0.0 };
            assert!(close(ratio, b.probability, 2.0 * tol), "{name}: {ratio} vs {}", b.probability);
        }
    }
}

#[test]
fn value_type_mismatch() {
    let p = bundled("pipeline");
    let e = infer(&p, &Query::Value(Value::pair(Value::T, Value::T)), &InferOptions::default()).unwrap_err();
    assert!(matches!(e, Error::ValueType { .. }));
    let e = infer(&p, &Query::All, &InferOptions { max_fanout: 1, ..Default::default() }).unwrap_err();
    assert!(matches!(e, Error::Param(_)));
}

#[test]
fn parallel_matches_sequential() {
    let p = bundled("pair_output");
    let seq = infer(&p, &Query::All, &InferOptions::default()).unwrap();
    let par = infer(&p, &Query::All, &InferOptions { parallel: true, ..Default::default() }).unwrap();
    let probs = |r: &QueryResult| r.values.iter().map(|v| (v.value.clone(), v.probability)).collect::<Vec<_>>();
    assert_eq!(probs(&seq), probs(&par));
}
