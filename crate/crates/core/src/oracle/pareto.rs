use num_traits::{Signed, Zero};

use super::{ExecTree, Outcome};
use crate::lang::{Rational, Value};

/// Achievable `(mass of v among accepted runs, accepted mass)` points.
pub type ParetoSet = Vec<(Rational, Rational)>;

fn leaf(o: &Outcome, w: &Rational, v: &Value) -> (Rational, Rational) {
    match o {
        Outcome::Val(x) if x == v => (w.clone(), w.clone()),
        Outcome::Val(_) => (Rational::zero(), w.clone()),
        Outcome::Reject => (Rational::zero(), Rational::zero()),
    }
}

fn minkowski(a: &ParetoSet, b: &ParetoSet) -> ParetoSet {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (n1, d1) in a {
        for (n2, d2) in b {
            out.push((n1 + n2, d1 + d2));
        }
    }
    out
}

fn cross(o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Vertices of the convex hull (monotone chain, exact).
pub fn hull(mut pts: ParetoSet) -> ParetoSet {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: ParetoSet = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: ParetoSet = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Bottom-up achievable set: union at nondeterministic nodes, sums at
/// probabilistic nodes (leaf weights are absolute). With `prune`, every
/// intermediate set is cut down to its hull vertices.
pub fn pareto_set(tree: &ExecTree, v: &Value, prune: bool) -> ParetoSet {
    crate::dd::deep(|| {
        let set = match tree {
            ExecTree::Leaf(o, w) => return vec![leaf(o, w, v)],
            ExecTree::Ndet(a, b) => {
                let mut s = pareto_set(a, v, prune);
                s.extend(pareto_set(b, v, prune));
                s
            }
            ExecTree::Prob(_, a, b) => minkowski(&pareto_set(a, v, prune), &pareto_set(b, v, prune)),
        };
        if prune {
            hull(set)
        } else {
            set
        }
    })
}

/// One point per deterministic strategy: every nondeterministic tree node
/// resolved independently.
pub fn brute_force_points(tree: &ExecTree, v: &Value) -> ParetoSet {
    pareto_set(tree, v, false)
}

/// `max num/den` over the set, with `den = 0` counting as 0.
pub fn max_ratio(set: &ParetoSet) -> Rational {
    set.iter().map(|(n, d)| if d.is_zero() { Rational::zero() } else { n / d }).max().unwrap_or_else(Rational::zero)
}
