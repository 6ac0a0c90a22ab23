//! Core language: types, values and the A-normal-form expression tree that
//! every later stage consumes.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ty {
    Bool,
    Product(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn pair(a: Ty, b: Ty) -> Ty {
        Ty::Product(Box::new(a), Box::new(b))
    }

    /// Number of boolean leaves.
    pub fn width(&self) -> usize {
        match self {
            Ty::Bool => 1,
            Ty::Product(a, b) => a.width() + b.width(),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Bool => write!(f, "bool"),
            Ty::Product(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    T,
    F,
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn bool(b: bool) -> Value {
        if b {
            Value::T
        } else {
            Value::F
        }
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::T => Some(true),
            Value::F => Some(false),
            Value::Pair(..) => None,
        }
    }

    pub fn has_type(&self, ty: &Ty) -> bool {
        match (self, ty) {
            (Value::T | Value::F, Ty::Bool) => true,
            (Value::Pair(a, b), Ty::Product(ta, tb)) => a.has_type(ta) && b.has_type(tb),
            _ => false,
        }
    }

    pub fn ty(&self) -> Ty {
        match self {
            Value::T | Value::F => Ty::Bool,
            Value::Pair(a, b) => Ty::pair(a.ty(), b.ty()),
        }
    }

    /// Boolean leaves in left-to-right order.
    pub fn bits(&self) -> Vec<bool> {
        let mut out = Vec::new();
        self.collect_bits(&mut out);
        out
    }

    fn collect_bits(&self, out: &mut Vec<bool>) {
        match self {
            Value::T => out.push(true),
            Value::F => out.push(false),
            Value::Pair(a, b) => {
                a.collect_bits(out);
                b.collect_bits(out);
            }
        }
    }

    /// Rebuilds a value of shape `ty` from its leaves.
    pub fn from_bits(ty: &Ty, bits: &[bool]) -> Value {
        fn go(ty: &Ty, bits: &[bool], at: &mut usize) -> Value {
            match ty {
                Ty::Bool => {
                    let v = Value::bool(bits[*at]);
                    *at += 1;
                    v
                }
                Ty::Product(a, b) => {
                    let l = go(a, bits, at);
                    let r = go(b, bits, at);
                    Value::pair(l, r)
                }
            }
        }
        let mut at = 0;
        go(ty, bits, &mut at)
    }

    /// Parses the compact `T`/`F`/`(v,v)` notation used in MDP labels.
    pub fn parse_compact(s: &str) -> Option<Value> {
        fn go(s: &[u8], at: &mut usize) -> Option<Value> {
            while *at < s.len() && s[*at] == b' ' {
                *at += 1;
            }
            match s.get(*at)? {
                b'T' => {
                    *at += 1;
                    Some(Value::T)
                }
                b'F' => {
                    *at += 1;
                    Some(Value::F)
                }
                b'(' => {
                    *at += 1;
                    let a = go(s, at)?;
                    while *at < s.len() && s[*at] == b' ' {
                        *at += 1;
                    }
                    if s.get(*at)? != &b',' {
                        return None;
                    }
                    *at += 1;
                    let b = go(s, at)?;
                    while *at < s.len() && s[*at] == b' ' {
                        *at += 1;
                    }
                    if s.get(*at)? != &b')' {
                        return None;
                    }
                    *at += 1;
                    Some(Value::pair(a, b))
                }
                _ => None,
            }
        }
        let bytes = s.trim().as_bytes();
        let mut at = 0;
        let v = go(bytes, &mut at)?;
        (at == bytes.len()).then_some(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::T => write!(f, "T"),
            Value::F => write!(f, "F"),
            Value::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// Variable or constant: the only argument form allowed in A-normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Var(Arc<str>),
    Val(Value),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(x) => write!(f, "{x}"),
            Atom::Val(v) => write!(f, "{}", pretty_value(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoreKind {
    Atom(Atom),
    Tuple(Atom, Atom),
    Fst(Atom),
    Snd(Atom),
    If(Atom, Box<CoreExpr>, Box<CoreExpr>),
    Let(Arc<str>, Box<CoreExpr>, Box<CoreExpr>),
    Call(Arc<str>, Atom),
    Flip(Rational),
    NFlip,
    Observe(Atom),
}

/// Typed core expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreExpr {
    pub kind: CoreKind,
    pub ty: Ty,
    pub pos: Pos,
}

impl CoreExpr {
    pub fn new(kind: CoreKind, ty: Ty, pos: Pos) -> CoreExpr {
        CoreExpr { kind, ty, pos }
    }

    pub fn is_anf(&self) -> bool {
        match &self.kind {
            CoreKind::If(_, t, e) => t.is_anf() && e.is_anf(),
            CoreKind::Let(_, a, b) => a.is_anf() && b.is_anf(),
            _ => true,
        }
    }

    /// Number of flip/nflip nodes in the syntax tree.
    pub fn static_flip_count(&self) -> usize {
        match &self.kind {
            CoreKind::Flip(_) | CoreKind::NFlip => 1,
            CoreKind::If(_, t, e) => t.static_flip_count() + e.static_flip_count(),
            CoreKind::Let(_, a, b) => a.static_flip_count() + b.static_flip_count(),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreFunction {
    pub name: Arc<str>,
    pub param: Arc<str>,
    pub param_ty: Ty,
    pub ret_ty: Ty,
    pub body: CoreExpr,
}

/// Rendering hint for values of the program's output type: which boolean
/// tuples are really unsigned integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Bool,
    Int(u32),
    Pair(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn ty(&self) -> Ty {
        match self {
            Shape::Bool => Ty::Bool,
            Shape::Int(w) => int_ty(*w),
            Shape::Pair(a, b) => Ty::pair(a.ty(), b.ty()),
        }
    }

    /// Renders `v` in surface syntax (`true`, `3`, `(true, 2)`).
    pub fn render(&self, v: &Value) -> String {
        match (self, v) {
            (Shape::Bool, Value::T) => "true".into(),
            (Shape::Bool, Value::F) => "false".into(),
            (Shape::Int(w), v) => match int_of_value(*w, v) {
                Some(n) => n.to_string(),
                None => v.to_string(),
            },
            (Shape::Pair(a, b), Value::Pair(x, y)) => format!("({}, {})", a.render(x), b.render(y)),
            _ => v.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreProgram {
    pub functions: Vec<CoreFunction>,
    pub main: CoreExpr,
    pub output: Shape,
}

impl CoreProgram {
    pub fn output_ty(&self) -> &Ty {
        &self.main.ty
    }

    pub fn function(&self, name: &str) -> Option<&CoreFunction> {
        self.functions.iter().find(|f| &*f.name == name)
    }

    pub fn is_anf(&self) -> bool {
        self.main.is_anf() && self.functions.iter().all(|f| f.body.is_anf())
    }

    /// True when no `nflip` is reachable from main.
    pub fn is_probabilistic(&self) -> bool {
        fn has_nflip(e: &CoreExpr, p: &CoreProgram) -> bool {
            match &e.kind {
                CoreKind::NFlip => true,
                CoreKind::If(_, t, f) => has_nflip(t, p) || has_nflip(f, p),
                CoreKind::Let(_, a, b) => has_nflip(a, p) || has_nflip(b, p),
                CoreKind::Call(f, _) => p.function(f).is_some_and(|f| has_nflip(&f.body, p)),
                _ => false,
            }
        }
        !has_nflip(&self.main, self)
    }
}

/// Bits of a `w`-bit unsigned integer: right-nested pairs, most significant first.
pub fn int_ty(w: u32) -> Ty {
    assert!(w >= 1);
    if w == 1 {
        Ty::Bool
    } else {
        Ty::pair(Ty::Bool, int_ty(w - 1))
    }
}

pub fn int_value(w: u32, n: u64) -> Value {
    assert!(w >= 1);
    let bit = (n >> (w - 1)) & 1 == 1;
    if w == 1 {
        Value::bool(bit)
    } else {
        Value::pair(Value::bool(bit), int_value(w - 1, n))
    }
}

pub fn int_of_value(w: u32, v: &Value) -> Option<u64> {
    if !v.has_type(&int_ty(w)) {
        return None;
    }
    Some(v.bits().iter().fold(0u64, |acc, b| (acc << 1) | u64::from(*b)))
}

pub fn pretty_value(v: &Value) -> String {
    match v {
        Value::T => "true".into(),
        Value::F => "false".into(),
        Value::Pair(a, b) => format!("({}, {})", pretty_value(a), pretty_value(b)),
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative_value() && *q <= Rational::one()
}

trait NegativeValue {
    fn is_negative_value(&self) -> bool;
}

impl NegativeValue for Rational {
    fn is_negative_value(&self) -> bool {
        *self < Rational::zero()
    }
}
