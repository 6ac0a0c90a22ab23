use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checker::{Method, QueryResult, SchedulerWitness, Times};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub value: String,
    pub probability: f64,
    /// Exact rational as `n/d`.
    pub oracle: String,
    pub oracle_f64: f64,
    pub agrees: bool,
}

/// One structured output record per queried value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub value: String,
    pub probability: f64,
    pub method: Method,
    pub iterations: u64,
    pub add_nodes: usize,
    pub mdp_states_pre: usize,
    pub mdp_states_post: usize,
    pub times: Times,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<SchedulerWitness>,
}

pub fn records(result: &QueryResult, checks: Option<&[OracleCheck]>, stats: bool) -> Vec<Record> {
    result
        .values
        .iter()
        .enumerate()
        .map(|(i, r)| Record {
            value: r.value.clone(),
            probability: r.probability,
            method: r.method,
            iterations: r.iterations,
            add_nodes: r.stats.add_nodes,
            mdp_states_pre: r.stats.mdp_states_pre,
            mdp_states_post: r.stats.mdp_states_post,
            times: r.stats.times.clone(),
            oracle: checks.and_then(|c| c.get(i)).map(|c| c.oracle.clone()),
            witness: if stats { r.witness.clone() } else { None },
        })
        .collect()
}

/// JSON array of [`Record`]s.
pub fn render_json(result: &QueryResult, checks: Option<&[OracleCheck]>, stats: bool) -> String {
    let mut s = serde_json::to_string_pretty(&records(result, checks, stats)).unwrap_or_else(|_| "[]".into());
    s.push('\n');
    s
}

/// One `value: probability` line per value, with statistics and oracle
/// results appended on request.
pub fn render_text(result: &QueryResult, checks: Option<&[OracleCheck]>, stats: bool) -> String {
    let mut out = String::new();
    for (i, r) in result.values.iter().enumerate() {
        let _ = write!(out, "{}: {:.6}", r.value, r.probability);
        if stats {
            let s = &r.stats;
            let t = &s.times;
            let _ = write!(
                out,
                "  add_nodes={} mdp_states_pre={} mdp_states_post={} flips={} iterations={} method={} \
                 compile_ms={:.3} guard_ms={:.3} lift_ms={:.3} compress_ms={:.3} check_ms={:.3}",
                s.add_nodes,
                s.mdp_states_pre,
                s.mdp_states_post,
                s.flips,
                r.iterations,
                r.method,
                t.compile_ms,
                t.guard_ms,
                t.lift_ms,
                t.compress_ms,
                t.check_ms
            );
        }
        if let Some(c) = checks.and_then(|c| c.get(i)) {
            let verdict = if c.agrees { "agrees" } else { "DISAGREES" };
            let _ = write!(out, "  oracle={} ({:.6}) {verdict}", c.oracle, c.oracle_f64);
        }
        out.push('\n');
    }
    out
}
