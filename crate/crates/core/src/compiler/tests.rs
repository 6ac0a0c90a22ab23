use super::*;
use crate::dd::Op;
use crate::frontend::compile_source;
use crate::lang::{ratio, Value};

fn compile(src: &str) -> Compilation {
    compile_program(&compile_source(src).unwrap(), CompileOptions::default()).unwrap()
}

fn leaf(t: &FormulaTuple) -> BddRef {
    t.as_leaf().unwrap()
}

#[test]
fn flip_and_nflip() {
    let mut c = compile("flip(0.3)");
    let f1 = c.store.var(0).unwrap();
    assert_eq!(leaf(&c.triple.model), f1);
    assert_eq!(c.triple.accept, c.store.tt());
    assert_eq!(c.triple.trace[0].kind, FlipKind::Prob(ratio(3, 10)));
    let c = compile("nflip()");
    assert_eq!(c.triple.trace[0].kind, FlipKind::Nondet);
    assert_eq!(format_trace(&c.triple.trace), "f1:n");
}

#[test]
fn pair_output_triple() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../programs/pair_output.nd")).unwrap();
    let mut c = compile(&src);
    let f1 = c.store.var(0).unwrap();
    let f2 = c.store.var(1).unwrap();
    let f1f2 = c.store.and(f1, f2).unwrap();
    let f1_or_f2 = c.store.or(f1, f2).unwrap();
    assert_eq!(c.triple.model, FormulaTuple::pair(FormulaTuple::Leaf(f1f2), FormulaTuple::Leaf(f2)));
    assert_eq!(c.triple.accept, f1_or_f2);
    assert_eq!(format_trace(&c.triple.trace), "f1:2/3, f2:n");
    assert!(c.dump().contains("model:  (f1∧f2, f2)"), "{}", c.dump());
    assert!(c.dump().contains("accept: f1 ∨ ¬f1∧f2"), "{}", c.dump());
}

#[test]
fn figure_program_formulas() {
    let src = "let a = flip(0.3) in let b = nflip() in let t = observe(a || b) in \
               let c = flip(0.4) in let d = flip(0.2) in (a || c) && d";
    let mut c = compile(src);
    let f: Vec<BddRef> = (0..4).map(|i| c.store.var(i).unwrap()).collect();
    let ac = c.store.or(f[0], f[2]).unwrap();
    let phi = c.store.and(ac, f[3]).unwrap();
    let gamma = c.store.or(f[0], f[1]).unwrap();
    assert_eq!(leaf(&c.triple.model), phi);
    assert_eq!(c.triple.accept, gamma);
    assert_eq!(format_trace(&c.triple.trace), "f1:0.3, f2:n, f3:0.4, f4:0.2");
    for (i, t) in c.triple.trace.iter().enumerate() {
        assert_eq!(t.level as usize, i);
    }
}

#[test]
fn call_sites_get_fresh_flips() {
    let src = "fun g(x: bool): bool { flip(0.5) } let a = g(true) in let b = g(false) in a && b";
    for inline_calls in [false, true] {
        let p = compile_source(src).unwrap();
        let mut c = compile_program(&p, CompileOptions { inline_calls }).unwrap();
        assert_eq!(c.triple.trace.len(), 2);
        assert_eq!(c.store.level_count(), 2);
        let f1 = c.store.var(0).unwrap();
        let f2 = c.store.var(1).unwrap();
        let want = c.store.and(f1, f2).unwrap();
        assert_eq!(leaf(&c.triple.model), want);
    }
}

#[test]
fn template_and_inline_agree_on_nested_calls() {
    let src = "fun f(x: bool, y: bool): bool { let z = flip(0.25) in observe(x || z) && (y <-> z) } \
               fun g(a: bool): (bool, bool) { let u = nflip() in (f(a, u), f(u, a)) } \
               let p = flip(0.5) in let q = g(p) in (fst q) ^ (snd q)";
    let p = compile_source(src).unwrap();
    let mut a = compile_program(&p, CompileOptions { inline_calls: false }).unwrap();
    let b = compile_program(&p, CompileOptions { inline_calls: true }).unwrap();
    assert_eq!(
        a.triple.trace.iter().map(|t| &t.kind).collect::<Vec<_>>(),
        b.triple.trace.iter().map(|t| &t.kind).collect::<Vec<_>>()
    );
    let n = a.triple.trace.len();
    for row in 0..1usize << n {
        let bits: Vec<bool> = (0..n).map(|i| row >> i & 1 == 1).collect();
        let ra = a.store.eval_bdd(leaf(&a.triple.model), &bits).unwrap();
        let rb = b.store.eval_bdd(leaf(&b.triple.model), &bits).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(
            a.store.eval_bdd(a.triple.accept, &bits).unwrap(),
            b.store.eval_bdd(b.triple.accept, &bits).unwrap()
        );
    }
    // no placeholder survives
    for f in a.triple.model.leaves().into_iter().chain([a.triple.accept]) {
        assert!(a.store.support(f).unwrap().iter().all(|&l| l < n as u32));
    }
    let _ = a.store.apply(Op::And, a.triple.accept, a.triple.accept).unwrap();
}

#[test]
fn compilation_is_deterministic() {
    let src = "let x = uniform(0, 5) in x < 3";
    let a = compile(src);
    let b = compile(src);
    assert_eq!(a.dump(), b.dump());
}

#[test]
fn reduce_and_enumerate() {
    let p = compile_source("(flip(0.5), flip(0.5))").unwrap();
    let r = boolean_reduce(&p, &Value::pair(Value::T, Value::F)).unwrap();
    assert_eq!(r.output_ty(), &Ty::Bool);
    assert!(r.is_anf());
    assert!(boolean_reduce(&p, &Value::T).is_err());
    let all = enumerate_output_values(&Ty::Bool, 20).unwrap();
    assert_eq!(all, vec![Value::T, Value::F]);
    assert_eq!(enumerate_output_values(&Ty::pair(Ty::Bool, Ty::Bool), 20).unwrap().len(), 4);
    let wide = crate::lang::int_ty(21);
    assert!(matches!(enumerate_output_values(&wide, 20), Err(Error::TooManyValues { bits: 21, cap: 20 })));
}

#[test]
fn theta_formatting() {
    assert_eq!(format_theta(&ratio(3, 10)), "0.3");
    assert_eq!(format_theta(&ratio(2, 3)), "2/3");
    assert_eq!(format_theta(&ratio(1, 1)), "1");
    assert_eq!(format_theta(&ratio(1, 20)), "0.05");
    assert_eq!(format_theta(&ratio(0, 1)), "0");
}
