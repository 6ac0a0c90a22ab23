use proptest::prelude::*;

use nodice::checker::{conditional_bisection, conditional_restart};
use nodice::compiler::{boolean_reduce, compile_program, enumerate_output_values, CompileOptions};
use nodice::dd::AddValue;
use nodice::frontend::{compile_source, parse, pretty_core, pretty_program};
use nodice::gen::{random_source, sample, GenConfig};
use nodice::lang::{int_value, ratio, Rational, Ty, Value};
use nodice::mdp::{compress, lift, Mdp, DEFAULT_MAX_FANOUT};
use nodice::oracle::{execute, wmc_probabilistic, Outcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small() -> GenConfig {
    GenConfig { max_flips: 10, max_ndet_nodes: 4, ..GenConfig::default() }
}

fn lifted(p: &nodice::lang::CoreProgram) -> Mdp {
    let mut c = compile_program(p, CompileOptions::default()).unwrap();
    let root = c.store.guard(&c.triple.model, c.triple.accept).unwrap();
    lift(&c.store, root, &c.triple.trace).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pretty_printing_round_trips(seed in any::<u64>()) {
        let src = random_source(&mut ChaCha8Rng::seed_from_u64(seed), &small());
        let once = pretty_program(&parse(&src).unwrap());
        let twice = pretty_program(&parse(&once).unwrap());
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(pretty_core(&compile_source(&src).unwrap()), pretty_core(&compile_source(&once).unwrap()));
    }

    #[test]
    fn lowering_yields_anf(seed in any::<u64>()) {
        let src = random_source(&mut ChaCha8Rng::seed_from_u64(seed), &small());
        prop_assert!(compile_source(&src).unwrap().is_anf());
    }

    #[test]
    fn uniform_is_exact(lo in 0u64..12, span in 1u64..9) {
        let hi = lo + span;
        let p = compile_source(&format!("uniform({lo}, {hi})")).unwrap();
        let w = p.output_ty().width() as u32;
        let c = compile_program(&p, CompileOptions::default()).unwrap();
        for n in 0..1u64 << w {
            let (num, den) = wmc_probabilistic(&c, &int_value(w, n)).unwrap();
            prop_assert_eq!(den, Rational::from_integer(1.into()));
            let expected = if (lo..hi).contains(&n) { ratio(1, span as i64) } else { ratio(0, 1) };
            prop_assert_eq!(num, expected, "{}", n);
        }
    }

    #[test]
    fn compression_preserves_maxima(seed in 0u64..100_000) {
        let s = sample(seed, &small()).unwrap();
        for v in enumerate_output_values(s.program.output_ty(), 16).unwrap() {
            let (q, target) = if *s.program.output_ty() == Ty::Bool {
                (s.program.clone(), v)
            } else {
                (boolean_reduce(&s.program, &v).unwrap(), Value::T)
            };
            let m = lifted(&q);
            let (c, _) = compress(&m, DEFAULT_MAX_FANOUT).unwrap();
            let a = conditional_bisection(&m, &target, 1e-7).unwrap().probability;
            let b = conditional_bisection(&c, &target, 1e-7).unwrap().probability;
            prop_assert!((a - b).abs() <= 2e-7, "{} vs {}\n{}", a, b, s.source);
            let r = conditional_restart(&c, &target, 1e-7).unwrap().probability;
            prop_assert!((a - r).abs() <= 2e-7, "{} vs {}\n{}", a, r, s.source);
        }
    }

    #[test]
    fn add_matches_execution(seed in 0u64..100_000) {
        let s = sample(seed, &small()).unwrap();
        let mut c = compile_program(&s.program, CompileOptions::default()).unwrap();
        let root = c.store.guard(&c.triple.model, c.triple.accept).unwrap();
        let n = c.triple.trace.len();
        for mask in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let expected = match execute(&s.program, &a).unwrap() {
                Outcome::Val(v) => AddValue::Val(v),
                Outcome::Reject => AddValue::Reject,
            };
            prop_assert_eq!(c.store.eval_add(root, &a).unwrap(), expected, "{:?}\n{}", a, s.source);
        }
    }
}
