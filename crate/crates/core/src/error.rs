use std::io;

use thiserror::Error;

use crate::lang::Pos;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },

    #[error("type error at {pos}: {msg}")]
    Type { pos: Pos, msg: String },

    #[error("desugaring error at {pos}: {msg}")]
    Desugar { pos: Pos, msg: String },

    #[error(transparent)]
    Dd(#[from] DdError),

    #[error("value {value} does not have the program's output type {ty}")]
    ValueType { value: String, ty: String },

    #[error("output type has {bits} bits, above the enumeration cap of {cap}")]
    TooManyValues { bits: usize, cap: usize },

    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),

    #[error("program is not purely probabilistic")]
    Nondeterministic,

    #[error("MDP contains a cycle through state {0}")]
    Cyclic(usize),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("value iteration did not converge within {0} sweeps")]
    NoConvergence(u64),

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("methods disagree for {value}: bisection {bisection} vs restart {restart}")]
    MethodMismatch { value: String, bisection: f64, restart: f64 },

    #[error("unsupported benchmark: {0}")]
    Bench(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DdError {
    #[error("level {level} out of range (store has {count} levels)")]
    LevelOutOfRange { level: i64, count: u32 },

    #[error("reference belongs to a different store")]
    ForeignRef,

    #[error("formula tuple shapes differ")]
    ShapeMismatch,

    #[error("assignment has {got} bits, expected {expected}")]
    AssignmentLength { got: usize, expected: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
