use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BenchmarkSpec, Family};
use crate::error::{Error, Result};

pub const MAX_RUNWAY: usize = 64;
pub const MAX_COUPONS: usize = 16;
pub const MAX_HOPS: usize = 512;
pub const MAX_SAT_VARS: usize = 64;

fn too_big(spec: &BenchmarkSpec, why: &str) -> Error {
    Error::Bench(format!("{spec}: {why}"))
}

/// Source text for `spec`.
pub fn generate(spec: &BenchmarkSpec) -> Result<String> {
    let need = |n: usize| -> Result<()> {
        if spec.sizes.len() == n && spec.sizes.iter().all(|&s| s > 0 || matches!(spec.family, Family::BayesNet)) {
            Ok(())
        } else {
            Err(too_big(spec, &format!("expected {n} positive size parameter(s)")))
        }
    };
    match spec.family {
        Family::Runway => {
            need(1)?;
            runway(spec.sizes[0]).ok_or_else(|| too_big(spec, "runway needs 2..=64 locations"))
        }
        Family::CouponProb | Family::CouponNdet => {
            need(1)?;
            let n = spec.sizes[0];
            if !(2..=MAX_COUPONS).contains(&n) {
                return Err(too_big(spec, "coupon count must be in 2..=16"));
            }
            Ok(coupon(n, spec.family == Family::CouponNdet))
        }
        Family::Network => {
            need(1)?;
            if spec.sizes[0] > MAX_HOPS {
                return Err(too_big(spec, "at most 512 hops"));
            }
            Ok(network(spec.sizes[0]))
        }
        Family::BayesNet => {
            need(1)?;
            if spec.sizes[0] > 2 {
                return Err(too_big(spec, "at most 2 nondeterministic root nodes"));
            }
            Ok(survey(spec.sizes[0]))
        }
        Family::ThreeSat => {
            need(3)?;
            let (vars, clauses, pct) = (spec.sizes[0], spec.sizes[1], spec.sizes[2]);
            if !(3..=MAX_SAT_VARS).contains(&vars) || pct > 100 {
                return Err(too_big(spec, "needs 3..=64 variables and a percentage up to 100"));
            }
            Ok(threesat(vars, clauses, pct, spec.seed))
        }
    }
}

/// Vehicle on a runway of `n` cells observed for `n` steps. With `n = 3`
/// this is the three-cell tracking example.
fn runway(n: usize) -> Option<String> {
    if !(2..=MAX_RUNWAY).contains(&n) {
        return None;
    }
    let last = n - 1;
    let mut s = String::new();
    let _ = writeln!(s, "fun move(pos: int): int {{");
    let _ = writeln!(s, "  let m = if nflip() then flip(0.75) else flip(0.5) in");
    let _ = writeln!(s, "  if m && pos != {last} then pos + 1 else pos");
    let _ = writeln!(s, "}}\n");
    let _ = writeln!(s, "fun step(pos: int, obs: int): int {{");
    let _ = writeln!(s, "  let new_pos = move(pos) in");
    let _ = writeln!(s, "  let mes = if flip(0.9) then new_pos else uniform(0, {n}) in");
    let _ = writeln!(s, "  let o = observe(mes == obs) in");
    let _ = writeln!(s, "  new_pos");
    let _ = writeln!(s, "}}\n");
    let mut prev = "0".to_string();
    for i in 0..n {
        let _ = writeln!(s, "let p{} = step({prev}, {i}) in", i + 1);
        prev = format!("p{}", i + 1);
    }
    let _ = writeln!(s, "{prev} == {}", last / 2);
    Some(s)
}

fn component(x: &str, i: usize, n: usize) -> String {
    let mut e = x.to_string();
    for _ in 0..i {
        e = format!("(snd {e})");
    }
    if i + 1 < n {
        format!("(fst {e})")
    } else {
        e
    }
}

fn tuple_ty(n: usize) -> String {
    format!("({})", vec!["bool"; n].join(", "))
}

/// Collect `n` coupons in `n` rounds, two distinct coupons per round. The
/// nondeterministic variant picks one of three bowls each round.
fn coupon(n: usize, ndet: bool) -> String {
    let half = n / 2;
    let mut s = String::new();
    let _ = writeln!(s, "fun draw(bowl: int): int {{");
    if ndet {
        let _ = writeln!(s, "  if bowl == 0 then uniform(0, {n})");
        let _ = writeln!(s, "  else if bowl == 1 then (if flip(0.5) then uniform(0, {half}) else uniform(0, {n}))");
        let _ = writeln!(s, "  else (if flip(0.5) then uniform({half}, {n}) else uniform(0, {n}))");
    } else {
        let _ = writeln!(s, "  uniform(0, {n})");
    }
    let _ = writeln!(s, "}}\n");
    let _ = writeln!(s, "fun round(c: {}): {} {{", tuple_ty(n), tuple_ty(n));
    let bowl = if ndet { "choose(0, 3)" } else { "0" };
    let _ = writeln!(s, "  let bowl = {bowl} in");
    let _ = writeln!(s, "  let a = draw(bowl) in");
    let _ = writeln!(s, "  let b = draw(bowl) in");
    let _ = writeln!(s, "  let o = observe(a != b) in");
    let parts: Vec<String> = (0..n).map(|i| format!("{} || a == {i} || b == {i}", component("c", i, n))).collect();
    let _ = writeln!(s, "  ({})", parts.join(",\n   "));
    let _ = writeln!(s, "}}\n");
    let _ = writeln!(s, "let c0 = ({}) in", vec!["false"; n].join(", "));
    for r in 1..=n {
        let _ = writeln!(s, "let c{r} = round(c{}) in", r - 1);
    }
    let all: Vec<String> = (0..n).map(|i| component(&format!("c{n}"), i, n)).collect();
    let _ = writeln!(s, "{}", all.join(" && "));
    s
}

/// A packet forwarded `hops` times. Each hop routes through the lossy
/// server with a protocol-dependent probability; the protocol is chosen
/// nondeterministically among three.
fn network(hops: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fun hop(alive: bool): bool {{");
    let _ = writeln!(s, "  let lossy = if nflip() then flip(0.5) else if nflip() then flip(0.3) else flip(0.7) in");
    let _ = writeln!(s, "  let dropped = if lossy then flip(0.001) else false in");
    let _ = writeln!(s, "  alive && !dropped");
    let _ = writeln!(s, "}}\n");
    let _ = writeln!(s, "let a0 = true in");
    for i in 1..=hops {
        let _ = writeln!(s, "let a{i} = hop(a{}) in", i - 1);
    }
    let _ = writeln!(s, "!a{hops}");
    s
}

/// Small survey-style network (age, sex, education, occupation, residence,
/// transport) with `ndet` of the two root nodes chosen nondeterministically.
fn survey(ndet: usize) -> String {
    let age = if ndet >= 1 { "choose(0, 3)" } else { "if flip(0.3) then 0 else if flip(5/7) then 1 else 2" };
    let sex = if ndet >= 2 { "nflip()" } else { "flip(0.6)" };
    let mut s = String::new();
    let _ = writeln!(s, "let age = {age} in");
    let _ = writeln!(s, "let male = {sex} in");
    let _ = writeln!(s, "let uni = if age == 0 then (if male then flip(0.25) else flip(0.36))");
    let _ = writeln!(s, "          else if age == 1 then (if male then flip(0.28) else flip(0.32))");
    let _ = writeln!(s, "          else (if male then flip(0.1) else flip(0.12)) in");
    let _ = writeln!(s, "let employee = if uni then flip(0.92) else flip(0.96) in");
    let _ = writeln!(s, "let big = if uni then flip(0.2) else flip(0.28) in");
    let _ =
        writeln!(s, "let transport = if employee && big then (if flip(0.58) then 0 else if flip(0.57) then 1 else 2)");
    let _ = writeln!(s, "                else if employee then (if flip(0.70) then 0 else if flip(0.7) then 1 else 2)");
    let _ = writeln!(s, "                else if big then (if flip(0.56) then 0 else if flip(0.18) then 1 else 2)");
    let _ = writeln!(s, "                else (if flip(0.48) then 0 else if flip(0.19) then 1 else 2) in");
    let _ = writeln!(s, "let seen = observe(transport != 2) in");
    let _ = writeln!(s, "uni");
    s
}

/// Random 3-CNF; the first `pct`% of variables are nondeterministic, the
/// rest fair coins. True when every clause holds.
fn threesat(vars: usize, clauses: usize, pct: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ndet = vars * pct / 100;
    let mut s = String::new();
    for i in 0..vars {
        let rhs = if i < ndet { "nflip()" } else { "flip(0.5)" };
        let _ = writeln!(s, "let x{i} = {rhs} in");
    }
    let mut body = Vec::with_capacity(clauses);
    for _ in 0..clauses {
        let mut picked: Vec<usize> = Vec::with_capacity(3);
        while picked.len() < 3 {
            let v = rng.gen_range(0..vars);
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        let lits: Vec<String> =
            picked.iter().map(|&v| if rng.gen() { format!("x{v}") } else { format!("!x{v}") }).collect();
        body.push(format!("({})", lits.join(" || ")));
    }
    if body.is_empty() {
        body.push("true".into());
    }
    for (i, c) in body.iter().enumerate() {
        let _ = writeln!(s, "let k{i} = {c} in");
    }
    let all: Vec<String> = (0..body.len()).map(|i| format!("k{i}")).collect();
    let _ = writeln!(s, "{}", all.join(" && "));
    s
}
