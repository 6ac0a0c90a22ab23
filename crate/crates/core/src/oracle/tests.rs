use num_traits::One;

use super::*;
use crate::checker::{infer, InferOptions, Query};
use crate::compiler::{compile_program, CompileOptions};
use crate::dd::AddValue;
use crate::frontend::compile_source;
use crate::lang::ratio;

fn bundled_src(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../programs/{name}.nd", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn tree(src: &str) -> ExecTree {
    build_exec_tree_capped(&compile_source(src).unwrap(), DEFAULT_ORACLE_CAP).unwrap()
}

fn leaf(v: Value, w: Rational) -> Box<ExecTree> {
    Box::new(ExecTree::Leaf(Outcome::Val(v), w))
}

#[test]
fn single_flip_tree() {
    let t = tree("flip(0.3)");
    let expected = ExecTree::Prob(ratio(3, 10), leaf(Value::T, ratio(3, 10)), leaf(Value::F, ratio(7, 10)));
    assert_eq!(t, expected);
    assert_eq!(tree("observe false"), ExecTree::Leaf(Outcome::Reject, Rational::one()));
}

#[test]
fn observation_tree() {
    let t = tree(&bundled_src("choice_observed"));
    let third = ratio(1, 3);
    let expected = ExecTree::Ndet(
        Box::new(ExecTree::Prob(ratio(2, 3), leaf(Value::T, ratio(2, 3)), leaf(Value::F, third.clone()))),
        Box::new(ExecTree::Prob(
            ratio(2, 3),
            leaf(Value::T, ratio(2, 3)),
            Box::new(ExecTree::Leaf(Outcome::Reject, third)),
        )),
    );
    assert_eq!(t, expected);
    assert_eq!(oracle_max_conditional(&t, &Value::T), Rational::one());
    assert_eq!(oracle_max_conditional(&t, &Value::F), ratio(1, 3));
}

#[test]
fn worked_example_is_exact() {
    let t = tree(&bundled_src("coin_choice"));
    let best = oracle_max_conditional(&t, &Value::T);
    assert_eq!(best, ratio(301, 420));
    assert_eq!(oracle_max_conditional(&t.force(false), &Value::T), best);
    assert!(oracle_max_conditional(&t.force(true), &Value::T) < best);
    let t = tree(&bundled_src("coin_choice_biased"));
    let best = oracle_max_conditional(&t, &Value::T);
    assert_eq!(oracle_max_conditional(&t.force(true), &Value::T), best);
    assert!(oracle_max_conditional(&t.force(false), &Value::T) < best);
}

#[test]
fn let_examples_and_convexity() {
    let t1 = tree(&bundled_src("choice_first"));
    assert_eq!(oracle_max_conditional(&t1, &Value::T), ratio(2, 3));
    let t2 = tree(&bundled_src("choice_second"));
    assert_eq!(oracle_max_conditional(&t2, &Value::T), Rational::one());
    let pts = brute_force_points(&t1, &Value::T);
    assert!(pts.iter().all(|(_, d)| d.is_one()));
    let lo = pts.iter().map(|(n, _)| n.clone()).min().unwrap();
    let hi = pts.iter().map(|(n, _)| n.clone()).max().unwrap();
    for p in [ratio(1, 3), ratio(5, 12), ratio(1, 2), ratio(2, 3)] {
        assert!(lo <= p && p <= hi, "{p}");
    }
}

#[test]
fn pruning_and_brute_force_agree() {
    for name in [
        "pipeline",
        "coin_choice",
        "coin_choice_biased",
        "choice_first",
        "choice_second",
        "choice_observed",
        "pair_output",
        "runway",
    ] {
        let p = compile_source(&bundled_src(name)).unwrap();
        let t = build_exec_tree(&p).unwrap();
        for v in [Value::T, Value::F] {
            if !v.has_type(p.output_ty()) {
                continue;
            }
            let pruned = oracle_max_conditional(&t, &v);
            assert_eq!(max_ratio(&pareto_set(&t, &v, false)), pruned, "{name}");
            if t.ndet_nodes() <= BRUTE_FORCE_CAP {
                assert_eq!(brute_force_max_conditional(&t, &v).unwrap(), pruned, "{name}");
            }
        }
        assert_eq!(exec_tree_leaf_count(&p).unwrap(), t.leaves() as u128, "{name}");
        assert_eq!(t.force(true).total_weight(), Rational::one());
        assert_eq!(t.force(false).total_weight(), Rational::one());
    }
}

#[test]
fn cap_is_enforced() {
    let src = "let a = flip(0.5) in let b = flip(0.5) in let c = flip(0.5) in a && b && c";
    let p = compile_source(src).unwrap();
    assert!(matches!(build_exec_tree_capped(&p, 2), Err(Error::OracleLimit(_))));
    assert!(build_exec_tree_capped(&p, 3).is_ok());
}

#[test]
fn weighted_model_counts() {
    let wmc = |src: &str, v: Value| {
        let p = compile_source(src).unwrap();
        let c = compile_program(&p, CompileOptions::default()).unwrap();
        wmc_probabilistic(&c, &v)
    };
    assert_eq!(wmc("flip(0.3)", Value::T).unwrap(), (ratio(3, 10), Rational::one()));
    let choice_observed = bundled_src("choice_observed").replace("nflip()", "flip(1/2)");
    assert_eq!(wmc(&choice_observed, Value::T).unwrap(), (ratio(2, 3), ratio(5, 6)));
    assert!(matches!(wmc(&bundled_src("choice_observed"), Value::T), Err(Error::Nondeterministic)));
    let pipeline = bundled_src("pipeline").replace("nflip()", "flip(1/2)");
    let (num, den) = wmc(&pipeline, Value::T).unwrap();
    let r = infer(&compile_source(&pipeline).unwrap(), &Query::Value(Value::T), &InferOptions::default()).unwrap();
    let exact = crate::lang::rational_to_f64(&(num / den));
    assert!((r.values[0].probability - exact).abs() <= 1e-6);
}

#[test]
fn direct_execution_matches_add() {
    for name in ["pipeline", "coin_choice", "choice_first", "choice_observed", "pair_output"] {
        let p = compile_source(&bundled_src(name)).unwrap();
        let mut c = compile_program(&p, CompileOptions::default()).unwrap();
        let n = c.triple.trace.len();
        assert_eq!(flip_count(&p, &p.main) as usize, n);
        let root = c.store.guard(&c.triple.model, c.triple.accept).unwrap();
        for mask in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let expected = match execute(&p, &a).unwrap() {
                Outcome::Val(v) => AddValue::Val(v),
                Outcome::Reject => AddValue::Reject,
            };
            assert_eq!(c.store.eval_add(root, &a).unwrap(), expected, "{name} {a:?}");
        }
    }
}
