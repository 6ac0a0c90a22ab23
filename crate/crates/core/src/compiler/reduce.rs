use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lang::{Atom, CoreExpr, CoreKind, CoreProgram, Shape, Ty, Value};

pub const DEFAULT_VALUE_CAP: usize = 20;

/// Wraps `p` as `let x = p in x <-> v`, giving a Bool program whose
/// probability of `T` is the probability of `v` in `p`.
pub fn boolean_reduce(p: &CoreProgram, v: &Value) -> Result<CoreProgram> {
    let ty = p.output_ty();
    if !v.has_type(ty) {
        return Err(Error::ValueType { value: v.to_string(), ty: ty.to_string() });
    }
    if *v == Value::T {
        return Ok(CoreProgram { output: Shape::Bool, ..p.clone() });
    }
    let mut fresh = 0usize;
    let x: Arc<str> = "%out".into();
    let pos = p.main.pos;
    let test = matches(&x, v, ty, &mut fresh, pos);
    let main = CoreExpr::new(CoreKind::Let(x, Box::new(p.main.clone()), Box::new(test)), Ty::Bool, pos);
    Ok(CoreProgram { functions: p.functions.clone(), main, output: Shape::Bool })
}

/// Core expression testing whether variable `x` (of type `ty`) equals `v`.
fn matches(x: &Arc<str>, v: &Value, ty: &Ty, fresh: &mut usize, pos: crate::lang::Pos) -> CoreExpr {
    let var = Atom::Var(x.clone());
    let bool_expr = |kind| CoreExpr::new(kind, Ty::Bool, pos);
    match (v, ty) {
        (Value::T, _) => bool_expr(CoreKind::Atom(var)),
        (Value::F, _) => bool_expr(CoreKind::If(
            var,
            Box::new(bool_expr(CoreKind::Atom(Atom::Val(Value::F)))),
            Box::new(bool_expr(CoreKind::Atom(Atom::Val(Value::T)))),
        )),
        (Value::Pair(va, vb), Ty::Product(ta, tb)) => {
            let mut name = |tag: &str| -> Arc<str> {
                *fresh += 1;
                format!("%out{tag}{fresh}").into()
            };
            let (a, ea, b, eb) = (name("a"), name("e"), name("b"), name("e"));
            let test_a = matches(&a, va, ta, fresh, pos);
            let test_b = matches(&b, vb, tb, fresh, pos);
            let conj = bool_expr(CoreKind::If(
                Atom::Var(ea.clone()),
                Box::new(bool_expr(CoreKind::Atom(Atom::Var(eb.clone())))),
                Box::new(bool_expr(CoreKind::Atom(Atom::Val(Value::F)))),
            ));
            let let_ = |n: Arc<str>, bound: CoreExpr, body: CoreExpr| {
                CoreExpr::new(CoreKind::Let(n, Box::new(bound), Box::new(body)), Ty::Bool, pos)
            };
            let inner = let_(eb, test_b, conj);
            let inner = let_(b, CoreExpr::new(CoreKind::Snd(var.clone()), (**tb).clone(), pos), inner);
            let inner = let_(ea, test_a, inner);
            let_(a, CoreExpr::new(CoreKind::Fst(var), (**ta).clone(), pos), inner)
        }
        (Value::Pair(..), Ty::Bool) => unreachable!("checked by has_type"),
    }
}

/// All values of `ty` in a fixed order: bit patterns counted up from all-`T`
/// to all-`F` (so `Bool` gives `[T, F]`).
pub fn enumerate_output_values(ty: &Ty, cap: usize) -> Result<Vec<Value>> {
    let w = ty.width();
    if w > cap {
        return Err(Error::TooManyValues { bits: w, cap });
    }
    Ok((0u64..1 << w)
        .map(|n| {
            let bits: Vec<bool> = (0..w).map(|i| (n >> (w - 1 - i)) & 1 == 0).collect();
            Value::from_bits(ty, &bits)
        })
        .collect())
}
