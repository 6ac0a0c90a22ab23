//! Explicit acyclic MDPs lifted from guarded ADDs.

mod compress;
mod explicit;
mod lift;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::Value;

pub use compress::{compress, CompressionReport, DEFAULT_MAX_FANOUT};
pub use explicit::{export_explicit, load_explicit_mdp, write_explicit};
pub use lift::lift;

/// Actions, ordered `d < l < r` as in exported files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    D,
    L,
    R,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::D => "d",
            Action::L => "l",
            Action::R => "r",
        }
    }

    pub fn parse(s: &str) -> Option<Action> {
        match s {
            "d" => Some(Action::D),
            "l" => Some(Action::L),
            "r" => Some(Action::R),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Atomic propositions: output values, `A` (accepted) and `R` (rejected).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ap {
    Val(Value),
    A,
    R,
}

impl fmt::Display for Ap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ap::Val(v) => write!(f, "{v}"),
            Ap::A => f.write_str("A"),
            Ap::R => f.write_str("R"),
        }
    }
}

pub type Row = Vec<(f64, usize)>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct State {
    /// Enabled actions with their distributions. Empty for absorbing states,
    /// whose self-loop is implicit.
    pub choices: Vec<(Action, Row)>,
    pub labels: BTreeSet<Ap>,
    /// Flip level the state was lifted from, if any.
    pub origin: Option<u32>,
}

impl State {
    pub fn is_absorbing(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn has(&self, ap: &Ap) -> bool {
        self.labels.contains(ap)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mdp {
    pub states: Vec<State>,
    pub initial: usize,
}

impl Mdp {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transition_count(&self) -> usize {
        self.states
            .iter()
            .map(|s| if s.is_absorbing() { 1 } else { s.choices.iter().map(|(_, r)| r.len()).sum() })
            .sum()
    }

    /// Successor states over all actions.
    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.states[s].choices.iter().flat_map(|(_, row)| row.iter().map(|&(_, d)| d))
    }

    /// States reachable from the initial state in breadth-first order,
    /// visiting actions in `d < l < r` order and rows in stored order.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::new();
        if self.is_empty() {
            return order;
        }
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            let mut choices: Vec<&(Action, Row)> = self.states[s].choices.iter().collect();
            choices.sort_by_key(|(a, _)| *a);
            for (_, row) in choices {
                for &(_, d) in row {
                    if !seen[d] {
                        seen[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
        order
    }

    /// Keeps the states reachable from the initial state, renumbered in
    /// breadth-first order.
    pub fn renumber_bfs(&self) -> Mdp {
        let order = self.bfs_order();
        let mut index = vec![usize::MAX; self.len()];
        for (new, &old) in order.iter().enumerate() {
            index[old] = new;
        }
        let states = order
            .iter()
            .map(|&old| {
                let s = &self.states[old];
                State {
                    choices: s
                        .choices
                        .iter()
                        .map(|(a, row)| (*a, row.iter().map(|&(p, d)| (p, index[d])).collect()))
                        .collect(),
                    labels: s.labels.clone(),
                    origin: s.origin,
                }
            })
            .collect();
        Mdp { states, initial: 0 }
    }

    /// Topological order of the graph without absorbing self-loops, roots
    /// first. Fails on any other cycle.
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for s in 0..n {
            for d in self.successors(s) {
                if d != s || !self.states[s].is_absorbing() {
                    indeg[d] += 1;
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for d in self.successors(s) {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push_back(d);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&s| indeg[s] > 0).unwrap_or(0);
            return Err(Error::Cyclic(stuck));
        }
        Ok(order)
    }

    /// Redirects every absorbing `R` state to the initial state.
    pub fn normalize_restart(&self) -> Mdp {
        let mut m = self.clone();
        let init = m.initial;
        for (i, s) in m.states.iter_mut().enumerate() {
            if s.is_absorbing() && s.has(&Ap::R) && i != init {
                s.choices = vec![(Action::D, vec![(1.0, init)])];
            }
        }
        m
    }

    /// Checks row sums and action sets (`d` alone, or `l` and `r`).
    pub fn validate(&self, eps: f64) -> Result<()> {
        if self.initial >= self.len() {
            return Err(Error::Internal(format!("initial state {} out of range", self.initial)));
        }
        for (i, s) in self.states.iter().enumerate() {
            for (a, row) in &s.choices {
                let sum: f64 = row.iter().map(|(p, _)| p).sum();
                if (sum - 1.0).abs() > eps {
                    return Err(Error::Internal(format!("state {i} action {a} sums to {sum}")));
                }
                if row.iter().any(|&(p, d)| !(0.0..=1.0).contains(&p) || d >= self.len()) {
                    return Err(Error::Internal(format!("state {i} action {a} has a bad entry")));
                }
            }
            let acts: Vec<Action> = s.choices.iter().map(|(a, _)| *a).collect();
            let ok = matches!(acts.as_slice(), [] | [Action::D] | [Action::L, Action::R]);
            if !ok {
                return Err(Error::Internal(format!("state {i} has actions {acts:?}")));
            }
        }
        Ok(())
    }

    /// Number of states carrying `ap`.
    pub fn count_label(&self, ap: &Ap) -> usize {
        self.states.iter().filter(|s| s.has(ap)).count()
    }
}

#[cfg(test)]
mod tests;
