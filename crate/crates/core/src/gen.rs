//! Random well-typed programs for differential testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frontend::compile_source;
use crate::lang::CoreProgram;
use crate::oracle::{build_exec_tree_capped, ExecTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Upper bound on compiled flips.
    pub max_flips: usize,
    /// Upper bound on nondeterministic nodes in the execution tree.
    pub max_ndet_nodes: usize,
    pub max_lets: usize,
    pub max_functions: usize,
    pub ints: bool,
    /// Allow `nflip` and `choose`.
    pub nondet: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { max_flips: 12, max_ndet_nodes: 6, max_lets: 5, max_functions: 2, ints: true, nondet: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Bool,
    Pair,
    Int,
}

const THETAS: [&str; 10] = ["1/2", "1/3", "2/3", "1/4", "3/4", "0.1", "0.9", "1/5", "0", "1"];

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    vars: Vec<(String, Kind)>,
    funcs: Vec<String>,
    ints: bool,
    nondet: bool,
}

impl Gen<'_> {
    fn theta(&mut self) -> &'static str {
        // Deterministic coins are rare but present.
        let i = if self.rng.gen_bool(0.1) { self.rng.gen_range(8..10) } else { self.rng.gen_range(0..8) };
        THETAS[i]
    }

    fn vars_of(&self, k: Kind) -> Vec<String> {
        self.vars.iter().filter(|(_, vk)| *vk == k).map(|(n, _)| n.clone()).collect()
    }

    fn bool_leaf(&mut self) -> String {
        let bools = self.vars_of(Kind::Bool);
        let pairs = self.vars_of(Kind::Pair);
        let ints = self.vars_of(Kind::Int);
        match self.rng.gen_range(0..10) {
            0..=2 if !bools.is_empty() => bools.choose(self.rng).unwrap().clone(),
            3 if !pairs.is_empty() => {
                let p = pairs.choose(self.rng).unwrap().clone();
                if self.rng.gen() {
                    format!("fst {p}")
                } else {
                    format!("snd {p}")
                }
            }
            4 if !ints.is_empty() => {
                let x = ints.choose(self.rng).unwrap().clone();
                let k = self.rng.gen_range(0..4);
                let op = ["==", "!=", "<", ">="].choose(self.rng).unwrap();
                format!("({x} {op} {k})")
            }
            5 if self.nondet => "nflip()".into(),
            6 if self.rng.gen_bool(0.2) => (if self.rng.gen() { "true" } else { "false" }).into(),
            _ => format!("flip({})", self.theta()),
        }
    }

    fn bool_expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.bool_leaf();
        }
        match self.rng.gen_range(0..9) {
            0 => format!("!{}", self.bool_leaf()),
            1 => {
                format!("if {} then {} else {}", self.bool_leaf(), self.bool_expr(depth - 1), self.bool_expr(depth - 1))
            }
            2 if !self.funcs.is_empty() => {
                let f = self.funcs.choose(self.rng).unwrap().clone();
                format!("{f}({}, {})", self.bool_leaf(), self.bool_leaf())
            }
            _ => {
                let op = ["&&", "||", "<->", "^"].choose(self.rng).unwrap();
                format!("({} {op} {})", self.bool_expr(depth - 1), self.bool_expr(depth - 1))
            }
        }
    }

    fn rhs(&mut self) -> (String, Kind) {
        match self.rng.gen_range(0..12) {
            0 | 1 => (format!("observe({})", self.bool_expr(1)), Kind::Bool),
            2 => (format!("({}, {})", self.bool_expr(1), self.bool_expr(1)), Kind::Pair),
            3 if self.ints => {
                let hi = self.rng.gen_range(2..=4);
                let op = if self.nondet && self.rng.gen() { "choose" } else { "uniform" };
                (format!("{op}(0, {hi})"), Kind::Int)
            }
            4 if self.ints && !self.vars_of(Kind::Int).is_empty() => {
                let x = self.vars_of(Kind::Int).choose(self.rng).unwrap().clone();
                let k = self.rng.gen_range(1..4);
                (format!("if {} then {x} + {k} else {x}", self.bool_leaf()), Kind::Int)
            }
            _ => (self.bool_expr(2), Kind::Bool),
        }
    }

    fn program(&mut self, cfg: &GenConfig) -> String {
        let mut out = String::new();
        for i in 0..self.rng.gen_range(0..=cfg.max_functions) {
            let saved = std::mem::replace(&mut self.vars, vec![("a".into(), Kind::Bool), ("b".into(), Kind::Bool)]);
            let body = self.bool_expr(2);
            self.vars = saved;
            let name = format!("g{i}");
            out.push_str(&format!("fun {name}(a: bool, b: bool): bool {{ {body} }}\n"));
            self.funcs.push(name);
        }
        for i in 0..self.rng.gen_range(1..=cfg.max_lets) {
            let (rhs, kind) = self.rhs();
            let name = format!("v{i}");
            out.push_str(&format!("let {name} = {rhs} in\n"));
            self.vars.push((name, kind));
        }
        let result = match self.rng.gen_range(0..6) {
            0 => format!("({}, {})", self.bool_leaf(), self.bool_leaf()),
            1 if !self.vars_of(Kind::Int).is_empty() => self.vars_of(Kind::Int).choose(self.rng).unwrap().clone(),
            _ => self.bool_expr(2),
        };
        out.push_str(&result);
        out.push('\n');
        out
    }
}

/// Random source text. Not filtered by size.
pub fn random_source(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> String {
    let mut g = Gen { rng, vars: Vec::new(), funcs: Vec::new(), ints: cfg.ints, nondet: cfg.nondet };
    g.program(cfg)
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub source: String,
    pub program: CoreProgram,
    pub tree: ExecTree,
}

/// First generated program within the configured limits, deterministic in
/// `seed`.
pub fn sample(seed: u64, cfg: &GenConfig) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let source = random_source(&mut rng, cfg);
        let program = compile_source(&source)?;
        let flips = crate::oracle::flip_count(&program, &program.main) as usize;
        if flips > cfg.max_flips {
            continue;
        }
        let tree = build_exec_tree_capped(&program, cfg.max_flips)?;
        if tree.ndet_nodes() > cfg.max_ndet_nodes {
            continue;
        }
        return Ok(Sample { source, program, tree });
    }
    Err(Error::Internal(format!("no program within limits for seed {seed}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_deterministic_and_bounded() {
        let cfg = GenConfig::default();
        for seed in 0..40 {
            let a = sample(seed, &cfg).unwrap();
            let b = sample(seed, &cfg).unwrap();
            assert_eq!(a.source, b.source);
            assert!(a.tree.ndet_nodes() <= cfg.max_ndet_nodes);
            assert!(a.tree.depth() <= cfg.max_flips);
        }
        let prob = GenConfig { nondet: false, ..cfg };
        for seed in 0..40 {
            assert!(sample(seed, &prob).unwrap().program.is_probabilistic());
        }
    }
}
