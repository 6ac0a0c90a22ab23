use super::*;
use crate::compiler::{compile_program, CompileOptions};
use crate::frontend::compile_source;

pub(crate) fn lifted(src: &str) -> Mdp {
    let p = compile_source(src).unwrap();
    let mut c = compile_program(&p, CompileOptions::default()).unwrap();
    let root = c.store.guard(&c.triple.model, c.triple.accept).unwrap();
    lift(&c.store, root, &c.triple.trace).unwrap()
}

const FIG5: &str = "let a = flip(0.3) in let b = nflip() in let t = observe(a || b) in \
                    let c = flip(0.4) in let d = flip(0.2) in (a || c) && d";

fn st(choices: Vec<(Action, Row)>, labels: &[Ap]) -> State {
    State { choices, labels: labels.iter().cloned().collect(), origin: None }
}

#[test]
fn lift_matches_the_figure() {
    let m = lifted(FIG5);
    assert_eq!(m.len(), 7);
    assert_eq!(m.transition_count(), 8 + 3);
    assert_eq!(m.states[0].choices, vec![(Action::D, vec![(0.3, 1), (0.7, 2)])]);
    let f2 = &m.states[2];
    assert_eq!(f2.choices.iter().map(|(a, _)| *a).collect::<Vec<_>>(), vec![Action::L, Action::R]);
    assert_eq!(m.count_label(&Ap::R), 1);
    assert_eq!(m.count_label(&Ap::A), 2);
    m.validate(1e-12).unwrap();
}

#[test]
fn lift_degenerate_cases() {
    let m = lifted("true");
    assert_eq!(m.len(), 1);
    assert!(m.states[0].is_absorbing());
    assert!(m.states[0].has(&Ap::Val(Value::T)) && m.states[0].has(&Ap::A));
    let m = lifted("flip(1)");
    assert_eq!(m.states[0].choices, vec![(Action::D, vec![(1.0, 1)])]);
}

#[test]
fn export_format_and_round_trip() {
    let m = lifted(FIG5);
    let text = write_explicit(&m);
    assert!(text.starts_with("STATES 7\nINITIAL 0\n"), "{text}");
    assert!(text.contains("TRANS 0 d 1 0.3\n"));
    assert!(text.contains("TRANS 0 d 2 0.7\n"));
    assert!(text.contains("TRANS 2 l "));
    assert!(text.contains("LABEL 3 T\nLABEL 3 A\n") || text.contains("LABEL 4 T\nLABEL 4 A\n"));
    let back = load_explicit_mdp(&text).unwrap();
    assert_eq!(write_explicit(&back), text);
    let mut expected = m.renumber_bfs();
    expected.states.iter_mut().for_each(|s| s.origin = None);
    assert_eq!(back, expected);
}

#[test]
fn load_errors_carry_line_numbers() {
    let e = load_explicit_mdp("STATES 2\nINITIAL 0\nTRANS 0 d 1 0.5\nTRANS 1 d 1 1\n").unwrap_err();
    assert!(matches!(e, Error::Format { line: 3, .. }), "{e}");
    let e = load_explicit_mdp("STATES 2\nINITIAL 5\n").unwrap_err();
    assert!(matches!(e, Error::Format { line: 2, .. }), "{e}");
    let e = load_explicit_mdp("STATES 1\nINITIAL 0\nTRANS 0 x 0 1\n").unwrap_err();
    assert!(matches!(e, Error::Format { line: 3, .. }), "{e}");
    let e = load_explicit_mdp("STATES 1\nINITIAL 0\nbogus\n").unwrap_err();
    assert!(matches!(e, Error::Format { line: 3, .. }), "{e}");
}

#[test]
fn restart_redirects_only_reject_states() {
    let m = lifted(FIG5);
    let n = m.normalize_restart();
    let changed: Vec<usize> = (0..m.len()).filter(|&i| m.states[i] != n.states[i]).collect();
    assert_eq!(changed.len(), 1);
    let r = changed[0];
    assert!(m.states[r].has(&Ap::R));
    assert_eq!(n.states[r].choices, vec![(Action::D, vec![(1.0, 0)])]);
    assert!(n.topo_order().is_err());
    let plain = lifted("flip(0.5)");
    assert_eq!(plain.normalize_restart(), plain);
    let only_r = lifted("observe false");
    assert_eq!(only_r.normalize_restart(), only_r);
}

#[test]
fn compress_chain() {
    // 0 -l-> 1 -d-> 2 (T), 0 -r-> 3 (R)
    let m = Mdp {
        states: vec![
            st(vec![(Action::L, vec![(1.0, 1)]), (Action::R, vec![(1.0, 3)])], &[]),
            st(vec![(Action::D, vec![(1.0, 2)])], &[]),
            st(vec![], &[Ap::Val(Value::T), Ap::A]),
            st(vec![], &[Ap::R]),
        ],
        initial: 0,
    };
    let (c, rep) = compress(&m, DEFAULT_MAX_FANOUT).unwrap();
    assert_eq!(rep.removed, 1);
    assert_eq!(c.len(), 3);
    assert_eq!(c.states[0].choices[0], (Action::L, vec![(1.0, 1)]));
    assert!(c.states[1].has(&Ap::A));
}

#[test]
fn compress_splits_probability() {
    // 0 -d-> {1: q, 4: 1-q}; 1 -d-> {2: p, 3: 1-p}
    let (q, p) = (0.25, 0.6);
    let m = Mdp {
        states: vec![
            st(vec![(Action::D, vec![(q, 1), (1.0 - q, 4)])], &[]),
            st(vec![(Action::D, vec![(p, 2), (1.0 - p, 3)])], &[]),
            st(vec![], &[Ap::Val(Value::T), Ap::A]),
            st(vec![], &[Ap::Val(Value::F), Ap::A]),
            st(vec![], &[Ap::R]),
        ],
        initial: 0,
    };
    let (c, rep) = compress(&m, DEFAULT_MAX_FANOUT).unwrap();
    assert_eq!(rep.removed, 1);
    let row = &c.states[0].choices[0].1;
    let mass = |label: &Ap| -> f64 { row.iter().filter(|&&(_, d)| c.states[d].has(label)).map(|&(p, _)| p).sum() };
    assert!((mass(&Ap::Val(Value::T)) - q * p).abs() < 1e-15);
    assert!((mass(&Ap::Val(Value::F)) - q * (1.0 - p)).abs() < 1e-15);
    c.validate(1e-12).unwrap();
}

#[test]
fn compress_respects_fanout_and_nondeterminism() {
    let m = lifted("let a = nflip() in let b = nflip() in a && b");
    let (c, rep) = compress(&m, DEFAULT_MAX_FANOUT).unwrap();
    assert_eq!(rep.removed, 0);
    assert_eq!(c.len(), m.len());
    // uniform(0, 8) is a balanced tree of probabilistic states
    let m = lifted("uniform(0, 8)");
    let (c, _) = compress(&m, DEFAULT_MAX_FANOUT).unwrap();
    assert_eq!(c.len(), 9);
    let (c2, rep2) = compress(&m, 2).unwrap();
    assert!(c2.len() > c.len());
    assert!(rep2.fanout_after <= 2);
    assert!(compress(&m, 1).is_err());
}

#[test]
fn compress_preserves_row_sums() {
    let m = lifted("let x = uniform(0, 7) in let y = uniform(0, 5) in x + y");
    let (c, _) = compress(&m, DEFAULT_MAX_FANOUT).unwrap();
    c.validate(1e-12).unwrap();
    assert!(c.len() < m.len());
}
