//! Maximum (conditional) reachability on lifted MDPs.

mod infer;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::Value;
use crate::mdp::{Action, Ap, Mdp};

pub use infer::{analyze, infer, prepare, InferOptions, Prepared, Query, QueryResult, Stats, Times, ValueResult};

/// Sign dead-band for the bisection comparison.
pub const DEAD_BAND: f64 = 1e-12;
pub const MAX_SWEEPS: u64 = 10_000_000;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Bisection,
    Restart,
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bisection => "bisection",
            Method::Restart => "restart",
            Method::Both => "both",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Method, String> {
        match s {
            "bisection" => Ok(Method::Bisection),
            "restart" => Ok(Method::Restart),
            "both" => Ok(Method::Both),
            _ => Err(format!("unknown method `{s}` (expected bisection, restart or both)")),
        }
    }
}

/// Choice made at one nondeterministic state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub state: usize,
    /// Flip level the state was lifted from.
    pub level: Option<u32>,
    pub action: Action,
}

/// Memoryless deterministic scheduler, defined on the `l`/`r` states.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerWitness {
    pub choices: Vec<Choice>,
}

impl SchedulerWitness {
    pub fn action(&self, state: usize) -> Option<Action> {
        self.choices.iter().find(|c| c.state == state).map(|c| c.action)
    }

    /// Actions chosen at states lifted from `level`.
    pub fn actions_at_level(&self, level: u32) -> Vec<Action> {
        self.choices.iter().filter(|c| c.level == Some(level)).map(|c| c.action).collect()
    }
}

fn is_nondet(m: &Mdp, s: usize) -> bool {
    m.states[s].choices.len() > 1
}

fn expectation(row: &[(f64, usize)], x: &[f64]) -> f64 {
    row.iter().map(|&(p, d)| p * x[d]).sum()
}

/// Maximum expected terminal reward over memoryless schedulers, with the
/// maximizing choices. Ties go to the first action (`l`).
pub fn weighted_terminal_value(m: &Mdp, reward: impl Fn(&BTreeSet<Ap>) -> f64) -> Result<(f64, SchedulerWitness)> {
    let order = m.topo_order()?;
    let mut x = vec![0.0; m.len()];
    let mut witness = SchedulerWitness::default();
    for &s in order.iter().rev() {
        let st = &m.states[s];
        if st.is_absorbing() {
            x[s] = reward(&st.labels);
            continue;
        }
        let mut best = (f64::NEG_INFINITY, Action::D);
        for (a, row) in &st.choices {
            let v = expectation(row, &x);
            if v > best.0 {
                best = (v, *a);
            }
        }
        x[s] = best.0;
        if is_nondet(m, s) {
            witness.choices.push(Choice { state: s, level: st.origin, action: best.1 });
        }
    }
    witness.choices.sort_by_key(|c| c.state);
    Ok((x[m.initial], witness))
}

/// Maximum probability of reaching a state labeled `target`.
pub fn max_reach_dag(m: &Mdp, target: &Ap) -> Result<f64> {
    Ok(weighted_terminal_value(m, |l| if l.contains(target) { 1.0 } else { 0.0 })?.0)
}

/// Probabilities of reaching `{v, A}` and `A` under a fixed scheduler.
/// States missing from the witness take `l`.
pub fn evaluate_scheduler(m: &Mdp, witness: &SchedulerWitness, v: &Value) -> Result<(f64, f64)> {
    let order = m.topo_order()?;
    let mut num = vec![0.0; m.len()];
    let mut den = vec![0.0; m.len()];
    let target = Ap::Val(v.clone());
    for &s in order.iter().rev() {
        let st = &m.states[s];
        if st.is_absorbing() {
            den[s] = if st.has(&Ap::A) { 1.0 } else { 0.0 };
            num[s] = if st.has(&Ap::A) && st.has(&target) { 1.0 } else { 0.0 };
            continue;
        }
        let row = if is_nondet(m, s) {
            let a = witness.action(s).unwrap_or(Action::L);
            &st.choices.iter().find(|(b, _)| *b == a).unwrap_or(&st.choices[0]).1
        } else {
            &st.choices[0].1
        };
        num[s] = expectation(row, &num);
        den[s] = expectation(row, &den);
    }
    Ok((num[m.initial], den[m.initial]))
}

/// Whether a state labeled `ap` is reachable along positive-probability edges.
pub fn reachable(m: &Mdp, ap: &Ap) -> bool {
    m.bfs_order().into_iter().any(|s| m.states[s].has(ap))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bisection {
    pub probability: f64,
    pub witness: SchedulerWitness,
    pub iterations: u64,
    /// Every `(λ, M(λ))` evaluated, in order.
    pub steps: Vec<(f64, f64)>,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Param(format!("tolerance must be positive, got {tol}")))
    }
}

/// `M(λ)`: maximum expected reward with `{v, A} ↦ 1 − λ`, other `A ↦ −λ`,
/// `R ↦ 0`. It is positive exactly when some scheduler's conditional
/// probability of `v` exceeds `λ`.
pub fn bisection_margin(m: &Mdp, v: &Value, lambda: f64) -> Result<(f64, SchedulerWitness)> {
    let target = Ap::Val(v.clone());
    weighted_terminal_value(m, |l| match (l.contains(&Ap::A), l.contains(&target)) {
        (true, true) => 1.0 - lambda,
        (true, false) => -lambda,
        _ => 0.0,
    })
}

/// Maximum conditional probability of `v` given acceptance, by binary
/// search on `λ` over `[0, 1]`. Returns the midpoint of the final interval
/// and the maximizing scheduler at its lower bound.
pub fn conditional_bisection(m: &Mdp, v: &Value, tol: f64) -> Result<Bisection> {
    check_tol(tol)?;
    if !reachable(m, &Ap::A) {
        return Ok(Bisection { probability: 0.0, witness: SchedulerWitness::default(), iterations: 0, steps: vec![] });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut witness = bisection_margin(m, v, lo)?.1;
    let mut steps = Vec::new();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (margin, w) = bisection_margin(m, v, mid)?;
        steps.push((mid, margin));
        // A scheduler rejecting every run scores 0, so M(λ) never drops
        // below 0 when one exists: the dead-band counts as an upper bound.
        if margin > DEAD_BAND {
            lo = mid;
            witness = w;
        } else {
            hi = mid;
        }
    }
    let iterations = steps.len() as u64;
    Ok(Bisection { probability: 0.5 * (lo + hi), witness, iterations, steps })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Restart {
    pub probability: f64,
    pub iterations: u64,
}

/// Maximum conditional probability of `v` given acceptance, as plain
/// maximum reachability of `v` after redirecting rejecting runs to the
/// initial state. Gauss-Seidel value iteration in reverse topological order
/// of the original DAG.
pub fn conditional_restart(m: &Mdp, v: &Value, tol: f64) -> Result<Restart> {
    check_tol(tol)?;
    let order = m.topo_order()?;
    let n = m.normalize_restart();
    let target = Ap::Val(v.clone());
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n.len()];
    for s in 0..n.len() {
        for d in n.successors(s) {
            preds[d].push(s);
        }
    }
    let mut can_reach = vec![false; n.len()];
    let mut stack: Vec<usize> = (0..n.len()).filter(|&s| n.states[s].has(&target) && n.states[s].has(&Ap::A)).collect();
    for &s in &stack {
        can_reach[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &preds[s] {
            if !can_reach[p] {
                can_reach[p] = true;
                stack.push(p);
            }
        }
    }
    if !can_reach[n.initial] {
        return Ok(Restart { probability: 0.0, iterations: 0 });
    }
    let goal = |s: usize| n.states[s].has(&target) && n.states[s].has(&Ap::A);
    let mut x: Vec<f64> = (0..n.len()).map(|s| if goal(s) { 1.0 } else { 0.0 }).collect();
    let eps = tol * 1e-3;
    let mut prev_diff = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        let mut diff = 0.0f64;
        for &s in order.iter().rev() {
            if goal(s) || !can_reach[s] {
                continue;
            }
            let st = &n.states[s];
            let val = st.choices.iter().map(|(_, row)| expectation(row, &x)).fold(0.0, f64::max);
            diff = diff.max((val - x[s]).abs());
            x[s] = val;
        }
        // Geometric tail bound once the contraction rate is visible.
        let rate = diff / prev_diff;
        let tail = if rate < 1.0 { diff * rate / (1.0 - rate) } else { f64::INFINITY };
        if diff < eps && (diff == 0.0 || tail < eps) {
            return Ok(Restart { probability: x[n.initial].clamp(0.0, 1.0), iterations: sweep });
        }
        prev_diff = diff;
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

#[cfg(test)]
mod tests;
