use std::fmt;
use std::sync::Arc;

use crate::lang::{Pos, Rational};

/// Surface type. Tuples are right-nested pairs; `Int(None)` is `int`
/// without an explicit width and is resolved by the type checker.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SType {
    Bool,
    Int(Option<u32>),
    Pair(Box<SType>, Box<SType>),
}

impl SType {
    pub fn pair(a: SType, b: SType) -> SType {
        SType::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for SType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SType::Bool => write!(f, "bool"),
            SType::Int(None) => write!(f, "int"),
            SType::Int(Some(w)) => write!(f, "int<{w}>"),
            SType::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Iff,
    Xor,
    Eq,
    Ne,
    Add,
    Sub,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Iff => "<->",
            BinOp::Xor => "^",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Iff => 1,
            BinOp::Or => 2,
            BinOp::Xor => 3,
            BinOp::And => 4,
            BinOp::Eq | BinOp::Ne => 5,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 6,
            BinOp::Add | BinOp::Sub => 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SKind {
    Bool(bool),
    Int(u64),
    Var(Arc<str>),
    Pair(Box<SExpr>, Box<SExpr>),
    Fst(Box<SExpr>),
    Snd(Box<SExpr>),
    If(Box<SExpr>, Box<SExpr>, Box<SExpr>),
    Let(Arc<str>, Box<SExpr>, Box<SExpr>),
    Call(Arc<str>, Vec<SExpr>),
    Flip(Rational),
    NFlip,
    Observe(Box<SExpr>),
    Not(Box<SExpr>),
    Binary(BinOp, Box<SExpr>, Box<SExpr>),
    Uniform(u64, u64),
    Choose(u64, u64),
}

/// Surface expression; `ty` is filled in by the type checker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SExpr {
    pub kind: SKind,
    pub pos: Pos,
    pub ty: Option<SType>,
}

impl SExpr {
    pub fn new(kind: SKind, pos: Pos) -> SExpr {
        SExpr { kind, pos, ty: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: Arc<str>,
    pub ty: SType,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFunction {
    pub name: Arc<str>,
    pub params: Vec<Param>,
    pub ret: SType,
    pub body: SExpr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceProgram {
    pub functions: Vec<SFunction>,
    pub main: SExpr,
}
