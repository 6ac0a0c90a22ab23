use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};

use super::{Action, Ap, Mdp, State};
use crate::compiler::{FlipEntry, FlipKind};
use crate::dd::{AddRef, AddValue, AddView, Store};
use crate::error::{Error, Result};
use crate::lang::{rational_to_f64, Rational};

/// One state per ADD node reachable from `root`, numbered breadth-first
/// (then-child first). Probabilistic levels get a single action `d`,
/// nondeterministic levels get Dirac actions `l` (then) and `r` (else).
/// Terminals are absorbing and labeled `{v, A}` or `{R}`.
pub fn lift(store: &Store, root: AddRef, trace: &[FlipEntry]) -> Result<Mdp> {
    let kinds: HashMap<u32, &FlipKind> = trace.iter().map(|t| (t.level, &t.kind)).collect();
    let mut index: HashMap<AddRef, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(root, 0);
    queue.push_back(root);
    while let Some(r) = queue.pop_front() {
        order.push(r);
        if let AddView::Node { hi, lo, .. } = store.add_view(r)? {
            for c in [hi, lo] {
                if !index.contains_key(&c) {
                    index.insert(c, index.len());
                    queue.push_back(c);
                }
            }
        }
    }
    let mut states = Vec::with_capacity(order.len());
    for r in order {
        let state = match store.add_view(r)? {
            AddView::Terminal(AddValue::Val(v)) => {
                State { choices: Vec::new(), labels: [Ap::Val(v.clone()), Ap::A].into_iter().collect(), origin: None }
            }
            AddView::Terminal(AddValue::Reject) => {
                State { choices: Vec::new(), labels: [Ap::R].into_iter().collect(), origin: None }
            }
            AddView::Node { level, hi, lo } => {
                let (hi, lo) = (index[&hi], index[&lo]);
                let choices = match kinds.get(&level) {
                    Some(FlipKind::Prob(theta)) => vec![(Action::D, split(theta, hi, lo))],
                    Some(FlipKind::Nondet) => {
                        vec![(Action::L, vec![(1.0, hi)]), (Action::R, vec![(1.0, lo)])]
                    }
                    None => return Err(Error::Internal(format!("ADD level {level} missing from trace"))),
                };
                State { choices, labels: Default::default(), origin: Some(level) }
            }
        };
        states.push(state);
    }
    Ok(Mdp { states, initial: 0 })
}

/// Distribution `θ` to `hi`, `1 − θ` to `lo`, dropping zero-probability
/// edges. Both probabilities are rounded once from exact rationals.
fn split(theta: &Rational, hi: usize, lo: usize) -> Vec<(f64, usize)> {
    let rest = Rational::one() - theta;
    let mut row = Vec::with_capacity(2);
    if !theta.is_zero() {
        row.push((rational_to_f64(theta), hi));
    }
    if !rest.is_zero() {
        row.push((rational_to_f64(&rest), lo));
    }
    row
}
