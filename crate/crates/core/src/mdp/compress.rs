use std::collections::BTreeSet;

use serde::Serialize;

use super::{Mdp, Row};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_FANOUT: usize = 40;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompressionReport {
    /// States spliced out of the MDP.
    pub removed: usize,
    /// States dropped because they became unreachable (for example the dead
    /// branch of a `flip(1)`), not counting spliced ones.
    pub unreachable: usize,
    pub max_fanout: usize,
    /// Largest number of distinct successors of any (state, action) after
    /// compression.
    pub fanout_after: usize,
}

fn fanout_with(row: &Row, s: usize, splice: &Row) -> usize {
    let mut dests: BTreeSet<usize> = row.iter().map(|&(_, d)| d).filter(|&d| d != s).collect();
    dests.extend(splice.iter().map(|&(_, d)| d));
    dests.len()
}

fn splice(row: &mut Row, s: usize, with: &Row) {
    let q: f64 = row.iter().filter(|&&(_, d)| d == s).map(|&(p, _)| p).sum();
    row.retain(|&(_, d)| d != s);
    for &(p, t) in with {
        match row.iter_mut().find(|(_, d)| *d == t) {
            Some(entry) => entry.0 += q * p,
            None => row.push((q * p, t)),
        }
    }
}

/// Splices out every unlabeled, non-initial state with a single enabled
/// action and no self-loop, in one reverse-topological pass. A splice is
/// skipped when it would give some predecessor row more than `max_fanout`
/// distinct successors. The result is renumbered breadth-first.
pub fn compress(m: &Mdp, max_fanout: usize) -> Result<(Mdp, CompressionReport)> {
    if max_fanout < 2 {
        return Err(Error::Param(format!("max fan-out must be at least 2, got {max_fanout}")));
    }
    let mut m = m.clone();
    let order = m.topo_order()?;
    let n = m.len();
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for s in 0..n {
        for d in m.successors(s).collect::<Vec<_>>() {
            preds[d].insert(s);
        }
    }
    let mut removed = 0;
    for &s in order.iter().rev() {
        let st = &m.states[s];
        if st.choices.len() != 1 || !st.labels.is_empty() || s == m.initial || preds[s].is_empty() {
            continue;
        }
        let row = st.choices[0].1.clone();
        if row.iter().any(|&(_, d)| d == s) {
            continue;
        }
        let fits = preds[s].iter().all(|&p| {
            m.states[p]
                .choices
                .iter()
                .filter(|(_, r)| r.iter().any(|&(_, d)| d == s))
                .all(|(_, r)| fanout_with(r, s, &row) <= max_fanout)
        });
        if !fits {
            continue;
        }
        let ps: Vec<usize> = preds[s].iter().copied().collect();
        for &p in &ps {
            for (_, r) in m.states[p].choices.iter_mut() {
                if r.iter().any(|&(_, d)| d == s) {
                    splice(r, s, &row);
                }
            }
            for &(_, t) in &row {
                preds[t].insert(p);
            }
        }
        for &(_, t) in &row {
            preds[t].remove(&s);
        }
        preds[s].clear();
        m.states[s].choices.clear();
        removed += 1;
    }
    let out = m.renumber_bfs();
    let fanout_after = out.states.iter().flat_map(|s| s.choices.iter().map(|(_, r)| r.len())).max().unwrap_or(0);
    let report = CompressionReport { removed, unreachable: n - removed - out.len(), max_fanout, fanout_after };
    Ok((out, report))
}
