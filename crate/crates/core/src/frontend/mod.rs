//! Source text to core programs: parse, type-check, desugar, A-normalize.

pub mod anf;
pub mod ast;
pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod typecheck;

use crate::error::{Error, Result};
use crate::lang::{int_value, CoreProgram, Shape, Value};
use ast::{SExpr, SKind, SType, SurfaceProgram};

pub use anf::a_normalize;
pub use desugar::desugar;
pub use parser::{parse, parse_expr};
pub use pretty::{pretty_core, pretty_expr, pretty_program};
pub use typecheck::typecheck;

pub fn shape_of(t: &SType) -> Shape {
    match t {
        SType::Bool => Shape::Bool,
        SType::Int(w) => Shape::Int(w.expect("resolved width")),
        SType::Pair(a, b) => Shape::Pair(Box::new(shape_of(a)), Box::new(shape_of(b))),
    }
}

/// Lowers a type-checked program to the core language.
pub fn lower_checked(p: &SurfaceProgram) -> Result<CoreProgram> {
    let d = desugar(p)?;
    let shape = shape_of(p.main.ty.as_ref().expect("typed main"));
    a_normalize(&d, shape)
}

pub fn compile_source(src: &str) -> Result<CoreProgram> {
    let p = typecheck(parse(src)?)?;
    lower_checked(&p)
}

/// Reads a command-line value literal (`true`, `3`, `(true, 2)`) at the
/// program's output shape. The compact `T`/`(T,F)` notation is also accepted.
pub fn parse_value_literal(text: &str, shape: &Shape) -> Result<Value> {
    let mismatch = || Error::ValueType { value: text.to_string(), ty: describe(shape) };
    if let Some(v) = Value::parse_compact(text) {
        return if v.has_type(&shape.ty()) { Ok(v) } else { Err(mismatch()) };
    }
    let e = parse_expr(text).map_err(|_| mismatch())?;
    literal(&e, shape).ok_or_else(mismatch)
}

fn literal(e: &SExpr, shape: &Shape) -> Option<Value> {
    match (&e.kind, shape) {
        (SKind::Bool(b), Shape::Bool) => Some(Value::bool(*b)),
        (SKind::Int(n), Shape::Int(w)) => (*w >= 64 || *n < (1u64 << *w)).then(|| int_value(*w, *n)),
        (SKind::Pair(a, b), Shape::Pair(sa, sb)) => Some(Value::pair(literal(a, sa)?, literal(b, sb)?)),
        _ => None,
    }
}

pub fn describe(shape: &Shape) -> String {
    match shape {
        Shape::Bool => "bool".into(),
        Shape::Int(w) => format!("int<{w}>"),
        Shape::Pair(a, b) => format!("({}, {})", describe(a), describe(b)),
    }
}
