//! Command-line driver.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{render_table, run_bench, BenchOptions, BenchmarkSpec, Family};
use crate::checker::{analyze, infer, prepare, InferOptions, Method, Query, QueryResult, DEFAULT_TOL};
use crate::compiler::{boolean_reduce, enumerate_output_values};
use crate::error::{Error, Result};
use crate::frontend::{compile_source, parse_value_literal};
use crate::lang::{CoreProgram, Ty, Value};
use crate::mdp::{load_explicit_mdp, write_explicit, DEFAULT_MAX_FANOUT};
use crate::oracle::{build_exec_tree, oracle_max_conditional};

pub use render::{render_json, render_text, OracleCheck, Record};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ANALYSIS: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nodice", version, about = "Exact maximum conditional probabilities for programs with nondeterminism")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CheckArgs {
    /// bisection, restart or both
    #[arg(long, default_value = "bisection")]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Print one JSON document instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum probability of output values given that all observations hold.
    Infer {
        file: PathBuf,
        /// Output value in surface syntax, e.g. `true`, `3`, `(true, 2)`.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        value: Option<String>,
        /// Query every value of the output type.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long)]
        no_compress: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_FANOUT)]
        max_fanout: usize,
        /// Write the checked MDP; with several values, one file per value
        /// with a `.N` suffix.
        #[arg(long, value_name = "PATH")]
        export_mdp: Option<PathBuf>,
        /// Cross-check against the exact execution-tree oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        stats: bool,
        /// Check values on worker threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Generate and run benchmark instances. threesat takes sizes in groups
    /// of three: variables, clauses, nondeterministic percentage.
    Bench {
        /// runway, coupon_prob, coupon_ndet, network, bayes_net or threesat
        family: Family,
        #[arg(required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Per-instance timeout in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long)]
        no_compress: bool,
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        check: CheckArgs,
        /// Print the generated source of each instance instead of running it.
        #[arg(long)]
        emit: bool,
    },
    /// Run the checker on an exported MDP file.
    CheckMdp {
        file: PathBuf,
        /// Terminal label, e.g. `true`, `T`, `(T,F)`.
        #[arg(long)]
        value: String,
        #[command(flatten)]
        check: CheckArgs,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Param(_) | Error::ValueType { .. } | Error::TooManyValues { .. } | Error::Bench(_) => {
            EXIT_USAGE
        }
        _ => EXIT_ANALYSIS,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn options(check: &CheckArgs, no_compress: bool, max_fanout: usize, parallel: bool) -> Result<InferOptions> {
    if !(check.tol > 0.0 && check.tol.is_finite()) {
        return Err(Error::Param(format!("--tol must be positive, got {}", check.tol)));
    }
    if max_fanout < 2 {
        return Err(Error::Param(format!("--max-fanout must be at least 2, got {max_fanout}")));
    }
    Ok(InferOptions {
        method: check.method,
        tol: check.tol,
        compress: !no_compress,
        max_fanout,
        parallel,
        ..InferOptions::default()
    })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Infer { file, value, all, check, no_compress, max_fanout, export_mdp, oracle, stats, parallel } => {
            let opts = options(&check, no_compress, max_fanout, parallel)?;
            let p = compile_source(&read(&file)?)?;
            let query = match (&value, all) {
                (Some(text), _) => Query::Value(parse_value_literal(text, &p.output)?),
                _ => Query::All,
            };
            let result = infer(&p, &query, &opts)?;
            if let Some(path) = export_mdp {
                export(&p, &query, &opts, &path)?;
            }
            let checks = if oracle { Some(oracle_checks(&p, &query, &result, opts.tol)?) } else { None };
            let text = if check.json {
                render_json(&result, checks.as_deref(), stats)
            } else {
                render_text(&result, checks.as_deref(), stats)
            };
            out.write_all(text.as_bytes())?;
            if let Some(bad) = checks.iter().flatten().find(|c| !c.agrees) {
                return Err(Error::Internal(format!(
                    "oracle disagrees for {}: {} vs {}",
                    bad.value, bad.probability, bad.oracle
                )));
            }
            Ok(())
        }
        Command::Bench { family, sizes, seed, timeout, no_compress, parallel, check, emit } => {
            let arity = family.arity();
            if sizes.len() % arity != 0 {
                return Err(Error::Bench(format!("{family} takes sizes in groups of {arity}")));
            }
            if !(timeout > 0.0 && timeout.is_finite()) {
                return Err(Error::Param(format!("--timeout must be positive, got {timeout}")));
            }
            let specs: Vec<BenchmarkSpec> =
                sizes.chunks(arity).map(|c| BenchmarkSpec { family, sizes: c.to_vec(), seed }).collect();
            if emit {
                for s in &specs {
                    writeln!(out, "// {s}\n{}", crate::bench::generate(s)?)?;
                }
                return Ok(());
            }
            let opts = BenchOptions {
                infer: options(&check, no_compress, DEFAULT_MAX_FANOUT, false)?,
                timeout: Duration::from_secs_f64(timeout),
                parallel,
            };
            let reports = run_bench(&specs, &opts);
            if check.json {
                let doc = serde_json::to_string_pretty(&reports).map_err(|e| Error::Internal(e.to_string()))?;
                writeln!(out, "{doc}")?;
            } else {
                out.write_all(render_table(&reports).as_bytes())?;
            }
            Ok(())
        }
        Command::CheckMdp { file, value, check } => {
            options(&check, false, DEFAULT_MAX_FANOUT, false)?;
            let m = load_explicit_mdp(&read(&file)?)?;
            m.validate(1e-9).map_err(|e| Error::Format { line: 0, msg: e.to_string() })?;
            let v = mdp_label(&value)?;
            let (probability, iterations, bisection, restart, witness) = analyze(&m, &v, check.method, check.tol)?;
            let stats =
                crate::checker::Stats { mdp_states_pre: m.len(), mdp_states_post: m.len(), ..Default::default() };
            let result = QueryResult {
                values: vec![crate::checker::ValueResult {
                    value: render_label(&v),
                    probability,
                    method: check.method,
                    iterations,
                    bisection,
                    restart,
                    witness,
                    stats,
                }],
            };
            let text = if check.json { render_json(&result, None, false) } else { render_text(&result, None, false) };
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Reads a label in compact (`(T,F)`) or boolean surface (`(true, false)`)
/// form.
fn mdp_label(text: &str) -> Result<Value> {
    let compact: String =
        text.replace("true", "T").replace("false", "F").chars().filter(|c| !c.is_whitespace()).collect();
    Value::parse_compact(&compact).ok_or_else(|| Error::ValueType { value: text.into(), ty: "MDP label".into() })
}

fn render_label(v: &Value) -> String {
    match v {
        Value::T => "true".into(),
        Value::F => "false".into(),
        Value::Pair(a, b) => format!("({}, {})", render_label(a), render_label(b)),
    }
}

fn export(p: &CoreProgram, query: &Query, opts: &InferOptions, path: &Path) -> Result<()> {
    if *p.output_ty() == Ty::Bool {
        let prep = prepare(p, opts)?;
        return Ok(fs::write(path, write_explicit(&prep.mdp))?);
    }
    let values = match query {
        Query::Value(v) => vec![v.clone()],
        Query::All => enumerate_output_values(p.output_ty(), opts.value_cap)?,
    };
    for (i, v) in values.iter().enumerate() {
        let prep = prepare(&boolean_reduce(p, v)?, opts)?;
        let target =
            if values.len() == 1 { path.to_path_buf() } else { PathBuf::from(format!("{}.{i}", path.display())) };
        fs::write(target, write_explicit(&prep.mdp))?;
    }
    Ok(())
}

fn oracle_checks(p: &CoreProgram, query: &Query, result: &QueryResult, tol: f64) -> Result<Vec<OracleCheck>> {
    let tree = build_exec_tree(p)?;
    let values = match query {
        Query::Value(v) => vec![v.clone()],
        Query::All => enumerate_output_values(p.output_ty(), usize::MAX)?,
    };
    Ok(values
        .iter()
        .zip(&result.values)
        .map(|(v, r)| {
            let exact = oracle_max_conditional(&tree, v);
            let approx = crate::lang::rational_to_f64(&exact);
            OracleCheck {
                value: r.value.clone(),
                probability: r.probability,
                oracle: exact.to_string(),
                oracle_f64: approx,
                agrees: (r.probability - approx).abs() <= 2.0 * tol,
            }
        })
        .collect())
}
