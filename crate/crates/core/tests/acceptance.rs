//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! (straight to stdout, so the lines show even when output is captured)
//! and fails if any criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use nodice::bench::{generate, BenchmarkSpec, Family};
use nodice::checker::{conditional_bisection, conditional_restart, infer, prepare, InferOptions, Method, Query};
use nodice::compiler::{boolean_reduce, compile_program, enumerate_output_values, CompileOptions, FlipKind};
use nodice::dd::AddValue;
use nodice::frontend::compile_source;
use nodice::gen::{sample, GenConfig, Sample};
use nodice::lang::{rational_to_f64, CoreProgram, Rational, Ty, Value};
use nodice::mdp::{compress, lift, write_explicit, Action, Ap, Mdp, State, DEFAULT_MAX_FANOUT};
use nodice::oracle::{
    brute_force_max_conditional, build_exec_tree, build_exec_tree_capped, exec_tree_leaf_count, execute,
    oracle_max_conditional, wmc_probabilistic, Outcome,
};

const TOL: f64 = 1e-6;
const BUNDLED: [&str; 8] = [
    "runway",
    "pipeline",
    "coin_choice",
    "coin_choice_biased",
    "choice_first",
    "choice_second",
    "choice_observed",
    "pair_output",
];

type Outcome_ = Result<String, String>;
type Check = fn() -> Outcome_;

fn source(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../programs/{name}.nd", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn program(name: &str) -> CoreProgram {
    compile_source(&source(name)).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn opts(method: Method, compress: bool) -> InferOptions {
    InferOptions { method, compress, ..Default::default() }
}

fn prob(p: &CoreProgram, v: &Value, o: &InferOptions) -> Result<f64, String> {
    infer(p, &Query::Value(v.clone()), o).map(|r| r.values[0].probability).map_err(|e| e.to_string())
}

fn nflip_action(name: &str) -> Result<(f64, Vec<Action>), String> {
    let prep = prepare(&program(name), &InferOptions::default()).map_err(|e| e.to_string())?;
    let level = prep.trace.iter().find(|e| e.kind == FlipKind::Nondet).ok_or("no nflip")?.level;
    let b = conditional_bisection(&prep.mdp, &Value::T, TOL).map_err(|e| e.to_string())?;
    Ok((b.probability, b.witness.actions_at_level(level)))
}

fn worked_example() -> Outcome_ {
    let t = Instant::now();
    let p = prob(&program("coin_choice"), &Value::T, &InferOptions::default())?;
    ensure((p - 301.0 / 420.0).abs() <= TOL, || format!("infer = {p}"))?;
    let (_, base) = nflip_action("coin_choice")?;
    ensure(base == [Action::R], || format!("witness at nflip {base:?}, expected F (r)"))?;
    let (_, variant) = nflip_action("coin_choice_biased")?;
    ensure(variant == [Action::L], || format!("variant witness {variant:?}, expected T (l)"))?;
    within(t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("infer = {p:.7}, witness F, variant witness T"))
}

fn runway() -> Outcome_ {
    let t = Instant::now();
    let p = program("runway");
    let got = prob(&p, &Value::T, &InferOptions::default())?;
    let tree = build_exec_tree(&p).map_err(|e| e.to_string())?;
    let exact = oracle_max_conditional(&tree, &Value::T);
    let exact_f = rational_to_f64(&exact);
    ensure(format!("{:.1}", got * 100.0) == "3.6", || format!("infer = {got}"))?;
    ensure((got - exact_f).abs() <= TOL, || format!("infer {got} vs oracle {exact}"))?;
    within(t.elapsed(), Duration::from_secs(5))?;
    Ok(format!("infer = {got:.6} ({:.2}%), oracle = {exact}", got * 100.0))
}

fn let_trio() -> Outcome_ {
    let t = Instant::now();
    let checks = [
        ("choice_first", Value::T, 2.0 / 3.0),
        ("choice_second", Value::T, 1.0),
        ("choice_observed", Value::T, 1.0),
        ("choice_observed", Value::F, 1.0 / 3.0),
    ];
    for (name, v, expected) in checks {
        let got = prob(&program(name), &v, &InferOptions::default())?;
        ensure((got - expected).abs() <= TOL, || format!("{name} {v}: {got} vs {expected}"))?;
    }
    within(t.elapsed(), Duration::from_secs(1))?;
    Ok("2/3, 1, 1 and 1/3".into())
}

fn pipeline_mdp() -> Mdp {
    let st = |choices: Vec<(Action, Vec<(f64, usize)>)>, labels: &[Ap]| State {
        choices,
        labels: labels.iter().cloned().collect(),
        origin: None,
    };
    // f1, f2, f3, f4, T, F, R
    let states = vec![
        st(vec![(Action::D, vec![(0.3, 3), (0.7, 1)])], &[]),
        st(vec![(Action::L, vec![(1.0, 2)]), (Action::R, vec![(1.0, 6)])], &[]),
        st(vec![(Action::D, vec![(0.4, 3), (0.6, 5)])], &[]),
        st(vec![(Action::D, vec![(0.2, 4), (0.8, 5)])], &[]),
        st(vec![], &[Ap::Val(Value::T), Ap::A]),
        st(vec![], &[Ap::Val(Value::F), Ap::A]),
        st(vec![], &[Ap::R]),
    ];
    Mdp { states, initial: 0 }
}

fn pipeline_golden() -> Outcome_ {
    let p = program("pipeline");
    let mut c = compile_program(&p, CompileOptions::default()).map_err(|e| e.to_string())?;
    let s = &mut c.store;
    let f: Vec<_> = (0..4).map(|i| s.var(i).unwrap()).collect();
    let f1_or_f3 = s.or(f[0], f[2]).unwrap();
    let phi = s.and(f1_or_f3, f[3]).unwrap();
    let gamma = s.or(f[0], f[1]).unwrap();
    ensure(c.triple.model.as_leaf() == Some(phi), || "model formula differs".into())?;
    ensure(c.triple.accept == gamma, || "accepting formula differs".into())?;
    let root = c.store.guard(&c.triple.model, c.triple.accept).map_err(|e| e.to_string())?;
    let size = c.store.add_size(root).map_err(|e| e.to_string())?;
    ensure(size == (4, 3), || format!("ADD has {size:?} inner/terminal nodes"))?;
    let m = lift(&c.store, root, &c.triple.trace).map_err(|e| e.to_string())?;
    ensure(write_explicit(&m) == write_explicit(&pipeline_mdp()), || format!("lifted MDP:\n{}", write_explicit(&m)))?;
    let got = prob(&p, &Value::T, &InferOptions::default())?;
    ensure((got - 0.2).abs() <= TOL, || format!("max P(T) = {got}"))?;
    Ok(format!("ADD 4+3 nodes, MDP matches, max P(T) = {got:.6}"))
}

fn random_samples(n: u64, cfg: &GenConfig, base: u64) -> Vec<Sample> {
    (base..base + n).map(|seed| sample(seed, cfg).unwrap()).collect()
}

fn oracle_sweep() -> Outcome_ {
    let t = Instant::now();
    let samples = random_samples(300, &GenConfig::default(), 0);
    let mut queries = 0;
    for (i, s) in samples.iter().enumerate() {
        let values = enumerate_output_values(s.program.output_ty(), 20).map_err(|e| e.to_string())?;
        let r = infer(&s.program, &Query::All, &InferOptions::default()).map_err(|e| format!("#{i}: {e}"))?;
        for (v, got) in values.iter().zip(&r.values) {
            let exact = oracle_max_conditional(&s.tree, v);
            let brute = brute_force_max_conditional(&s.tree, v).map_err(|e| e.to_string())?;
            ensure(exact == brute, || format!("#{i} {v}: pareto {exact} vs brute force {brute}\n{}", s.source))?;
            let exact = rational_to_f64(&exact);
            ensure((got.probability - exact).abs() <= 2.0 * TOL, || {
                format!("#{i} {v}: infer {} vs oracle {exact}\n{}", got.probability, s.source)
            })?;
            queries += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(300))?;
    Ok(format!("300 programs, {queries} queries"))
}

fn corpus() -> Vec<(String, CoreProgram)> {
    let mut out: Vec<(String, CoreProgram)> = BUNDLED.iter().map(|n| (n.to_string(), program(n))).collect();
    for s in random_samples(100, &GenConfig::default(), 5000) {
        out.push((s.source.clone(), s.program));
    }
    out
}

fn bool_targets(p: &CoreProgram) -> Vec<(CoreProgram, Value)> {
    let values = enumerate_output_values(p.output_ty(), 20).unwrap();
    if *p.output_ty() == Ty::Bool {
        values.into_iter().map(|v| (p.clone(), v)).collect()
    } else {
        values.iter().map(|v| (boolean_reduce(p, v).unwrap(), Value::T)).collect()
    }
}

fn compression_invariance() -> Outcome_ {
    let mut removed_total = 0;
    for (name, p) in corpus() {
        for (q, v) in bool_targets(&p) {
            let mut c = compile_program(&q, CompileOptions::default()).map_err(|e| e.to_string())?;
            let root = c.store.guard(&c.triple.model, c.triple.accept).map_err(|e| e.to_string())?;
            let m = lift(&c.store, root, &c.triple.trace).map_err(|e| e.to_string())?;
            let (small, report) = compress(&m, DEFAULT_MAX_FANOUT).map_err(|e| e.to_string())?;
            let eligible = m
                .bfs_order()
                .into_iter()
                .any(|s| s != m.initial && m.states[s].labels.is_empty() && m.states[s].choices.len() == 1);
            ensure(!eligible || report.removed >= 1, || format!("nothing removed from\n{name}"))?;
            removed_total += report.removed;
            for method in [Method::Bisection, Method::Restart] {
                let run = |m: &Mdp| match method {
                    Method::Restart => conditional_restart(m, &v, TOL).map(|r| r.probability),
                    _ => conditional_bisection(m, &v, TOL).map(|r| r.probability),
                };
                let a = run(&m).map_err(|e| e.to_string())?;
                let b = run(&small).map_err(|e| e.to_string())?;
                ensure((a - b).abs() <= 2.0 * TOL, || format!("{method}: {a} vs {b} on\n{name}"))?;
            }
        }
    }
    Ok(format!("bundled + 100 random programs, {removed_total} states removed"))
}

fn reduction_invariance() -> Outcome_ {
    let mut programs: Vec<(String, CoreProgram)> =
        corpus().into_iter().filter(|(_, p)| *p.output_ty() != Ty::Bool).collect();
    ensure(programs.iter().any(|(n, _)| n == "pair_output"), || "no bundled tuple program".into())?;
    let mut count = 0;
    for (name, p) in programs.drain(..) {
        let direct = prepare(&p, &InferOptions::default()).map_err(|e| e.to_string())?;
        for v in enumerate_output_values(p.output_ty(), 20).map_err(|e| e.to_string())? {
            let a = conditional_bisection(&direct.mdp, &v, TOL).map_err(|e| e.to_string())?.probability;
            let reduced = boolean_reduce(&p, &v).map_err(|e| e.to_string())?;
            let b = prob(&reduced, &Value::T, &InferOptions::default())?;
            ensure((a - b).abs() <= 2.0 * TOL, || format!("{v}: direct {a} vs reduced {b} on\n{name}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} tuple-valued queries"))
}

fn method_agreement() -> Outcome_ {
    let mut count = 0;
    for (name, p) in corpus() {
        let a = infer(&p, &Query::All, &opts(Method::Bisection, true)).map_err(|e| e.to_string())?;
        let b = infer(&p, &Query::All, &opts(Method::Restart, true)).map_err(|e| e.to_string())?;
        for (x, y) in a.values.iter().zip(&b.values) {
            ensure((x.probability - y.probability).abs() <= 2.0 * TOL, || {
                format!("{}: bisection {} vs restart {} on\n{name}", x.value, x.probability, y.probability)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} queries"))
}

fn add_correspondence() -> Outcome_ {
    let (mut programs, mut assignments) = (0, 0u64);
    for name in BUNDLED {
        let p = program(name);
        let mut c = compile_program(&p, CompileOptions::default()).map_err(|e| e.to_string())?;
        let n = c.triple.trace.len();
        if n > 14 {
            continue;
        }
        let root = c.store.guard(&c.triple.model, c.triple.accept).map_err(|e| e.to_string())?;
        for mask in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let expected = match execute(&p, &a).map_err(|e| e.to_string())? {
                Outcome::Val(v) => AddValue::Val(v),
                Outcome::Reject => AddValue::Reject,
            };
            let got = c.store.eval_add(root, &a).map_err(|e| e.to_string())?;
            ensure(got == expected, || format!("{name} at {a:?}: ADD {got} vs program {expected}"))?;
            assignments += 1;
        }
        programs += 1;
    }
    Ok(format!("{programs} programs, {assignments} assignments"))
}

fn probabilistic_regression() -> Outcome_ {
    let mut programs: Vec<(String, CoreProgram)> = ["pipeline", "choice_observed", "coin_choice", "choice_first"]
        .iter()
        .map(|n| {
            let src = source(n).replace("nflip()", "flip(1/2)");
            (src.clone(), compile_source(&src).unwrap())
        })
        .collect();
    let cfg = GenConfig { nondet: false, ..GenConfig::default() };
    for s in random_samples(100, &cfg, 9000) {
        programs.push((s.source, s.program));
    }
    let fine = InferOptions { tol: 1e-12, ..Default::default() };
    let mut count = 0;
    for (src, p) in programs {
        ensure(p.is_probabilistic(), || format!("not probabilistic:\n{src}"))?;
        let c = compile_program(&p, CompileOptions::default()).map_err(|e| e.to_string())?;
        let r = infer(&p, &Query::All, &fine).map_err(|e| e.to_string())?;
        let values = enumerate_output_values(p.output_ty(), 20).map_err(|e| e.to_string())?;
        for (v, got) in values.iter().zip(&r.values) {
            let (num, den) = wmc_probabilistic(&c, v).map_err(|e| e.to_string())?;
            let exact = if den == Rational::from_integer(0.into()) { 0.0 } else { rational_to_f64(&(num / den)) };
            ensure((got.probability - exact).abs() <= 1e-9, || {
                format!("{v}: infer {} vs wmc {exact} on\n{src}", got.probability)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} queries within 1e-9"))
}

fn performance_smoke() -> Outcome_ {
    let t = Instant::now();
    let spec = BenchmarkSpec::new(Family::CouponNdet, &[6]);
    let p = compile_source(&generate(&spec).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let r = infer(&p, &Query::Value(Value::T), &InferOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    let leaves = exec_tree_leaf_count(&p).map_err(|e| e.to_string())?;
    let states = r.values[0].stats.mdp_states_post;
    ensure((states as u128) < leaves, || format!("{states} MDP states vs {leaves} tree leaves"))?;
    // Cross-check the counter against a built tree on a smaller instance.
    let small = compile_source(&generate(&BenchmarkSpec::new(Family::CouponNdet, &[2])).unwrap()).unwrap();
    let tree = build_exec_tree_capped(&small, 32).map_err(|e| e.to_string())?;
    ensure(exec_tree_leaf_count(&small).unwrap() == tree.leaves() as u128, || "leaf counter mismatch".into())?;
    Ok(format!(
        "coupon_ndet-6 in {elapsed:.2?}, {states} MDP states vs {leaves} tree leaves, max P = {:.6}",
        r.values[0].probability
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Check); 11] = [
        ("worked example", worked_example),
        ("runway", runway),
        ("let and observe examples", let_trio),
        ("pipeline golden test", pipeline_golden),
        ("oracle equivalence sweep", oracle_sweep),
        ("compression invariance", compression_invariance),
        ("boolean reduction invariance", reduction_invariance),
        ("method agreement", method_agreement),
        ("ADD and semantics correspondence", add_correspondence),
        ("purely probabilistic regression", probabilistic_regression),
        ("performance smoke", performance_smoke),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let line = match &result {
            Ok(detail) => format!("criterion {:>2} PASS  {name}: {detail} [{:.2?}]", i + 1, t.elapsed()),
            Err(why) => format!("criterion {:>2} FAIL  {name}: {why} [{:.2?}]", i + 1, t.elapsed()),
        };
        let _ = writeln!(stdout, "{line}");
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    let _ = stdout.flush();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
