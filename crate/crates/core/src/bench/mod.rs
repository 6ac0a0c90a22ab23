//! Parameterized benchmark families and a timed runner.

mod families;

use std::fmt;
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checker::{infer, InferOptions, Query};
use crate::error::Result;
use crate::frontend::compile_source;
use crate::lang::Value;

pub use families::generate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Runway,
    CouponProb,
    CouponNdet,
    Network,
    BayesNet,
    ThreeSat,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Runway, Family::CouponProb, Family::CouponNdet, Family::Network, Family::BayesNet, Family::ThreeSat];

    pub fn name(self) -> &'static str {
        match self {
            Family::Runway => "runway",
            Family::CouponProb => "coupon_prob",
            Family::CouponNdet => "coupon_ndet",
            Family::Network => "network",
            Family::BayesNet => "bayes_net",
            Family::ThreeSat => "threesat",
        }
    }

    /// Number of size parameters one instance takes.
    pub fn arity(self) -> usize {
        if self == Family::ThreeSat {
            3
        } else {
            1
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Family, String> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
            format!("unknown family `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub family: Family,
    /// `[n]` for most families; `[vars, clauses, ndet_percent]` for threesat.
    pub sizes: Vec<usize>,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(family: Family, sizes: &[usize]) -> BenchmarkSpec {
        BenchmarkSpec { family, sizes: sizes.to_vec(), seed: 1 }
    }
}

impl fmt::Display for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "{}-{}", self.family, sizes.join("-"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub name: String,
    pub status: Status,
    pub flips: usize,
    pub compile_ms: f64,
    pub check_ms: f64,
    pub add_nodes: usize,
    pub mdp_states_pre: usize,
    pub mdp_states_post: usize,
    /// Maximum conditional probability of `true`.
    pub result: Option<f64>,
}

impl BenchReport {
    fn empty(name: String, status: Status) -> BenchReport {
        BenchReport {
            name,
            status,
            flips: 0,
            compile_ms: 0.0,
            check_ms: 0.0,
            add_nodes: 0,
            mdp_states_pre: 0,
            mdp_states_post: 0,
            result: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub infer: InferOptions,
    pub timeout: Duration,
    pub parallel: bool,
}

impl Default for BenchOptions {
    fn default() -> BenchOptions {
        BenchOptions { infer: InferOptions::default(), timeout: Duration::from_secs(60), parallel: false }
    }
}

fn run_one(spec: &BenchmarkSpec, infer_opts: &InferOptions) -> Result<BenchReport> {
    let src = generate(spec)?;
    let t = Instant::now();
    let p = compile_source(&src)?;
    let front_ms = t.elapsed().as_secs_f64() * 1e3;
    let r = infer(&p, &Query::Value(Value::T), infer_opts)?;
    let v = &r.values[0];
    let times = &v.stats.times;
    Ok(BenchReport {
        name: spec.to_string(),
        status: Status::Ok,
        flips: v.stats.flips,
        compile_ms: front_ms + times.compile_ms + times.guard_ms,
        check_ms: times.lift_ms + times.compress_ms + times.check_ms,
        add_nodes: v.stats.add_nodes,
        mdp_states_pre: v.stats.mdp_states_pre,
        mdp_states_post: v.stats.mdp_states_post,
        result: Some(v.probability),
    })
}

/// Runs one spec on a worker thread; a run past the timeout is reported as
/// `Timeout` and left to finish in the background.
fn run_timed(spec: &BenchmarkSpec, opts: &BenchOptions) -> BenchReport {
    let (tx, rx) = mpsc::channel();
    let (spec_c, infer_opts) = (spec.clone(), opts.infer.clone());
    let spawned = thread::Builder::new().stack_size(64 << 20).spawn(move || {
        let _ = tx.send(run_one(&spec_c, &infer_opts));
    });
    if let Err(e) = spawned {
        return BenchReport::empty(spec.to_string(), Status::Error(e.to_string()));
    }
    match rx.recv_timeout(opts.timeout) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => BenchReport::empty(spec.to_string(), Status::Error(e.to_string())),
        Err(mpsc::RecvTimeoutError::Timeout) => BenchReport::empty(spec.to_string(), Status::Timeout),
        Err(mpsc::RecvTimeoutError::Disconnected) => {
            BenchReport::empty(spec.to_string(), Status::Error("worker panicked".into()))
        }
    }
}

pub fn run_bench(specs: &[BenchmarkSpec], opts: &BenchOptions) -> Vec<BenchReport> {
    if opts.parallel {
        specs.par_iter().map(|s| run_timed(s, opts)).collect()
    } else {
        specs.iter().map(|s| run_timed(s, opts)).collect()
    }
}

/// Aligned text table, one row per report. Timeouts show `TO`.
pub fn render_table(reports: &[BenchReport]) -> String {
    let header = ["benchmark", "flips", "compile_ms", "check_ms", "add_nodes", "mdp_pre", "mdp_post", "result"];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in reports {
        let row = match &r.status {
            Status::Ok => vec![
                r.name.clone(),
                r.flips.to_string(),
                format!("{:.1}", r.compile_ms),
                format!("{:.1}", r.check_ms),
                r.add_nodes.to_string(),
                r.mdp_states_pre.to_string(),
                r.mdp_states_post.to_string(),
                r.result.map_or("-".into(), |p| format!("{p:.6}")),
            ],
            Status::Timeout => {
                let mut row = vec![r.name.clone()];
                row.extend(std::iter::repeat_n("TO".to_string(), header.len() - 1));
                row
            }
            Status::Error(e) => {
                let mut row = vec![r.name.clone()];
                row.extend(std::iter::repeat_n("-".to_string(), header.len() - 2));
                row.push(format!("error: {e}"));
                row
            }
        };
        rows.push(row);
    }
    let widths: Vec<usize> = (0..header.len()).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
