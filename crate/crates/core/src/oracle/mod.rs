//! Reference semantics without decision diagrams: explicit execution trees,
//! exact maximization of conditional probabilities, and exhaustive weighted
//! model counting.

mod count;
mod eval;
mod pareto;

use std::fmt;

use num_traits::{One, Zero};

use crate::compiler::{Compilation, FlipKind};
use crate::error::{Error, Result};
use crate::lang::{CoreProgram, Rational, Value};

pub use count::exec_tree_leaf_count;
pub use eval::{execute, flip_count};
pub use pareto::{brute_force_points, max_ratio, pareto_set, ParetoSet};

pub const DEFAULT_ORACLE_CAP: usize = 18;
pub const CAP_VAR: &str = "NODICE_ORACLE_CAP";
/// Most nondeterministic tree nodes brute-force enumeration will accept.
pub const BRUTE_FORCE_CAP: usize = 16;
pub const WMC_CAP: usize = 20;

/// Flip cap from `NODICE_ORACLE_CAP`, or the default.
pub fn oracle_cap() -> usize {
    std::env::var(CAP_VAR).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_ORACLE_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Val(Value),
    Reject,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Val(v) => write!(f, "{v}"),
            Outcome::Reject => f.write_str("R"),
        }
    }
}

/// Every execution of a program, branching at each flip. Leaf weights are
/// absolute path probabilities; nondeterministic nodes pass their weight to
/// both children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecTree {
    Prob(Rational, Box<ExecTree>, Box<ExecTree>),
    Ndet(Box<ExecTree>, Box<ExecTree>),
    Leaf(Outcome, Rational),
}

impl ExecTree {
    pub fn leaves(&self) -> usize {
        match self {
            ExecTree::Leaf(..) => 1,
            ExecTree::Prob(_, a, b) | ExecTree::Ndet(a, b) => a.leaves() + b.leaves(),
        }
    }

    pub fn ndet_nodes(&self) -> usize {
        match self {
            ExecTree::Leaf(..) => 0,
            ExecTree::Prob(_, a, b) => a.ndet_nodes() + b.ndet_nodes(),
            ExecTree::Ndet(a, b) => 1 + a.ndet_nodes() + b.ndet_nodes(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExecTree::Leaf(..) => 0,
            ExecTree::Prob(_, a, b) | ExecTree::Ndet(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Sum of leaf weights. Equals 1 on trees without nondeterministic nodes.
    pub fn total_weight(&self) -> Rational {
        match self {
            ExecTree::Leaf(_, w) => w.clone(),
            ExecTree::Prob(_, a, b) | ExecTree::Ndet(a, b) => a.total_weight() + b.total_weight(),
        }
    }

    /// Resolves every nondeterministic node to its `then` (true) or `else`
    /// child.
    pub fn force(&self, choice: bool) -> ExecTree {
        match self {
            ExecTree::Leaf(..) => self.clone(),
            ExecTree::Prob(q, a, b) => ExecTree::Prob(q.clone(), Box::new(a.force(choice)), Box::new(b.force(choice))),
            ExecTree::Ndet(a, b) => if choice { a } else { b }.force(choice),
        }
    }
}

/// Builds the execution tree of `p`, failing when some path executes more
/// than `cap` flips.
pub fn build_exec_tree_capped(p: &CoreProgram, cap: usize) -> Result<ExecTree> {
    let mut prefix = Vec::new();
    crate::dd::deep(|| grow(p, &mut prefix, Rational::one(), cap))
}

/// [`build_exec_tree_capped`] with the cap from [`oracle_cap`].
pub fn build_exec_tree(p: &CoreProgram) -> Result<ExecTree> {
    build_exec_tree_capped(p, oracle_cap())
}

fn grow(p: &CoreProgram, prefix: &mut Vec<bool>, weight: Rational, cap: usize) -> Result<ExecTree> {
    match eval::replay(p, prefix)? {
        eval::Replay::Done(o) => Ok(ExecTree::Leaf(o, weight)),
        eval::Replay::Need(kind) => {
            if prefix.len() >= cap {
                return Err(Error::OracleLimit(format!("an execution path has more than {cap} flips")));
            }
            let (wt, wf) = match &kind {
                FlipKind::Prob(q) => (&weight * q, &weight * (Rational::one() - q)),
                FlipKind::Nondet => (weight.clone(), weight),
            };
            prefix.push(true);
            let t = grow(p, prefix, wt, cap);
            prefix.pop();
            let t = t?;
            prefix.push(false);
            let f = grow(p, prefix, wf, cap);
            prefix.pop();
            let f = f?;
            Ok(match kind {
                FlipKind::Prob(q) => ExecTree::Prob(q, Box::new(t), Box::new(f)),
                FlipKind::Nondet => ExecTree::Ndet(Box::new(t), Box::new(f)),
            })
        }
    }
}

/// Exact maximum over schedulers of `P(v | all observations succeed)`, zero
/// when no scheduler accepts with positive probability.
pub fn oracle_max_conditional(tree: &ExecTree, v: &Value) -> Rational {
    max_ratio(&pareto_set(tree, v, true))
}

/// Maximum over every deterministic history-dependent strategy, enumerated
/// without pruning.
pub fn brute_force_max_conditional(tree: &ExecTree, v: &Value) -> Result<Rational> {
    let n = tree.ndet_nodes();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::OracleLimit(format!("{n} nondeterministic nodes exceed {BRUTE_FORCE_CAP}")));
    }
    Ok(max_ratio(&brute_force_points(tree, v)))
}

/// `(Σ weight of assignments accepting with output v, Σ weight of accepting
/// assignments)` by enumerating every assignment of the trace.
pub fn wmc_probabilistic(c: &Compilation, v: &Value) -> Result<(Rational, Rational)> {
    let trace = &c.triple.trace;
    if trace.iter().any(|e| e.kind == FlipKind::Nondet) {
        return Err(Error::Nondeterministic);
    }
    if trace.len() > WMC_CAP {
        return Err(Error::OracleLimit(format!("{} flips exceed {WMC_CAP}", trace.len())));
    }
    let leaves = c.triple.model.leaves();
    let bits = v.bits();
    if bits.len() != leaves.len() {
        return Err(Error::ValueType { value: v.to_string(), ty: c.ty().to_string() });
    }
    let n = trace.len();
    let mut theta = vec![Rational::zero(); n];
    for e in trace {
        if let FlipKind::Prob(q) = &e.kind {
            theta[e.level as usize] = q.clone();
        }
    }
    let (mut num, mut den) = (Rational::zero(), Rational::zero());
    let mut assignment = vec![false; n];
    for mask in 0u64..1 << n {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = mask >> i & 1 == 1;
        }
        if !c.store.eval_bdd(c.triple.accept, &assignment)? {
            continue;
        }
        let mut w = Rational::one();
        for (i, &a) in assignment.iter().enumerate() {
            w *= if a { theta[i].clone() } else { Rational::one() - &theta[i] };
        }
        let mut hit = true;
        for (leaf, &bit) in leaves.iter().zip(&bits) {
            if c.store.eval_bdd(*leaf, &assignment)? != bit {
                hit = false;
                break;
            }
        }
        if hit {
            num += &w;
        }
        den += w;
    }
    Ok((num, den))
}

#[cfg(test)]
mod tests;
