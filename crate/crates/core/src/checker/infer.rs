use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{conditional_bisection, conditional_restart, Method, SchedulerWitness, DEFAULT_TOL};
use crate::compiler::{
    boolean_reduce, compile_program, enumerate_output_values, CompileOptions, FlipEntry, DEFAULT_VALUE_CAP,
};
use crate::error::{Error, Result};
use crate::lang::{CoreProgram, Shape, Ty, Value};
use crate::mdp::{compress, lift, Mdp, DEFAULT_MAX_FANOUT};

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Value(Value),
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InferOptions {
    pub method: Method,
    pub tol: f64,
    pub compress: bool,
    pub max_fanout: usize,
    pub parallel: bool,
    pub value_cap: usize,
    pub compile: CompileOptions,
}

impl Default for InferOptions {
    fn default() -> InferOptions {
        InferOptions {
            method: Method::Bisection,
            tol: DEFAULT_TOL,
            compress: true,
            max_fanout: DEFAULT_MAX_FANOUT,
            parallel: false,
            value_cap: DEFAULT_VALUE_CAP,
            compile: CompileOptions::default(),
        }
    }
}

/// Wall-clock milliseconds per pipeline phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Times {
    pub compile_ms: f64,
    pub guard_ms: f64,
    pub lift_ms: f64,
    pub compress_ms: f64,
    pub check_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub flips: usize,
    /// Inner plus terminal nodes of the guarded ADD.
    pub add_nodes: usize,
    pub mdp_states_pre: usize,
    pub mdp_states_post: usize,
    pub times: Times,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueResult {
    /// Surface rendering of the queried value.
    pub value: String,
    pub probability: f64,
    pub method: Method,
    pub iterations: u64,
    pub bisection: Option<f64>,
    pub restart: Option<f64>,
    pub witness: Option<SchedulerWitness>,
    pub stats: Stats,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub values: Vec<ValueResult>,
}

impl QueryResult {
    pub fn probability(&self, rendered: &str) -> Option<f64> {
        self.values.iter().find(|r| r.value == rendered).map(|r| r.probability)
    }
}

/// Lifted (and possibly compressed) MDP for a Bool-output query.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub mdp: Mdp,
    pub trace: Vec<FlipEntry>,
    pub stats: Stats,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Compiles, guards, lifts and optionally compresses `p`.
pub fn prepare(p: &CoreProgram, opts: &InferOptions) -> Result<Prepared> {
    let mut stats = Stats::default();
    let t = Instant::now();
    let mut c = compile_program(p, opts.compile)?;
    stats.times.compile_ms = ms(t);
    stats.flips = c.triple.trace.len();
    let t = Instant::now();
    let root = c.store.guard(&c.triple.model, c.triple.accept)?;
    let (inner, terminals) = c.store.add_size(root)?;
    stats.add_nodes = inner + terminals;
    stats.times.guard_ms = ms(t);
    let t = Instant::now();
    let lifted = lift(&c.store, root, &c.triple.trace)?;
    stats.mdp_states_pre = lifted.len();
    stats.times.lift_ms = ms(t);
    let t = Instant::now();
    let mdp = if opts.compress { compress(&lifted, opts.max_fanout)?.0 } else { lifted };
    stats.mdp_states_post = mdp.len();
    stats.times.compress_ms = ms(t);
    Ok(Prepared { mdp, trace: c.triple.trace, stats })
}

/// Probability, iterations, bisection and restart results, witness.
pub type Analysis = (f64, u64, Option<f64>, Option<f64>, Option<SchedulerWitness>);

/// Runs the configured method(s) for the label `v` on `m`.
pub fn analyze(m: &Mdp, v: &Value, method: Method, tol: f64) -> Result<Analysis> {
    match method {
        Method::Bisection => {
            let b = conditional_bisection(m, v, tol)?;
            Ok((b.probability, b.iterations, Some(b.probability), None, Some(b.witness)))
        }
        Method::Restart => {
            let r = conditional_restart(m, v, tol)?;
            Ok((r.probability, r.iterations, None, Some(r.probability), None))
        }
        Method::Both => {
            let b = conditional_bisection(m, v, tol)?;
            let r = conditional_restart(m, v, tol)?;
            if (b.probability - r.probability).abs() > 2.0 * tol {
                return Err(Error::MethodMismatch {
                    value: v.to_string(),
                    bisection: b.probability,
                    restart: r.probability,
                });
            }
            Ok((b.probability, b.iterations + r.iterations, Some(b.probability), Some(r.probability), Some(b.witness)))
        }
    }
}

fn check_one(prep: &Prepared, label: &Value, rendered: String, opts: &InferOptions) -> Result<ValueResult> {
    let t = Instant::now();
    let (probability, iterations, bisection, restart, witness) = analyze(&prep.mdp, label, opts.method, opts.tol)?;
    let mut stats = prep.stats.clone();
    stats.times.check_ms = ms(t);
    Ok(ValueResult {
        value: rendered,
        probability,
        method: opts.method,
        iterations,
        bisection,
        restart,
        witness,
        stats,
    })
}

fn check_value(p: &CoreProgram, v: &Value, opts: &InferOptions) -> Result<ValueResult> {
    let reduced = boolean_reduce(p, v)?;
    let prep = prepare(&reduced, opts)?;
    check_one(&prep, &Value::T, p.output.render(v), opts)
}

/// Maximum conditional probability of each queried output value given
/// that all observations succeed. Bool programs are compiled once; other
/// output types are reduced to a Bool program per value.
pub fn infer(p: &CoreProgram, query: &Query, opts: &InferOptions) -> Result<QueryResult> {
    if opts.max_fanout < 2 {
        return Err(Error::Param(format!("max fan-out must be at least 2, got {}", opts.max_fanout)));
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::Param(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let ty = p.output_ty();
    let values = match query {
        Query::Value(v) if v.has_type(ty) => vec![v.clone()],
        Query::Value(v) => {
            return Err(Error::ValueType { value: p.output.render(v), ty: ty.to_string() });
        }
        Query::All => enumerate_output_values(ty, opts.value_cap)?,
    };
    let results: Result<Vec<ValueResult>> = if *ty == Ty::Bool {
        let p = CoreProgram { output: Shape::Bool, ..p.clone() };
        let prep = prepare(&p, opts)?;
        let run = |v: &Value| check_one(&prep, v, Shape::Bool.render(v), opts);
        if opts.parallel {
            values.par_iter().map(run).collect()
        } else {
            values.iter().map(run).collect()
        }
    } else if opts.parallel {
        values.par_iter().map(|v| check_value(p, v, opts)).collect()
    } else {
        values.iter().map(|v| check_value(p, v, opts)).collect()
    };
    Ok(QueryResult { values: results? })
}
