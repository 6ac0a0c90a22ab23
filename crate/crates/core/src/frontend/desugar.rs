//! Lowers typed surface syntax to a boolean-only expression tree: integers
//! become big-endian bit tuples, operators become `if` gates, and
//! `uniform`/`choose` become trees of `flip`/`nflip`.

use std::cell::Cell;
use std::sync::Arc;

use super::ast::{BinOp, SExpr, SKind, SType, SurfaceProgram};
use crate::error::{Error, Result};
use crate::lang::{int_ty, int_value, ratio, Pos, Rational, Ty, Value};

/// Non-ANF boolean core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DKind {
    Val(Value),
    Var(Arc<str>),
    Pair(Box<DExpr>, Box<DExpr>),
    Fst(Box<DExpr>),
    Snd(Box<DExpr>),
    If(Box<DExpr>, Box<DExpr>, Box<DExpr>),
    Let(Arc<str>, Box<DExpr>, Box<DExpr>),
    Call(Arc<str>, Box<DExpr>),
    Flip(Rational),
    NFlip,
    Observe(Box<DExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DExpr {
    pub kind: DKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DFunction {
    pub name: Arc<str>,
    pub param: Arc<str>,
    pub param_ty: Ty,
    pub ret_ty: Ty,
    pub body: DExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DProgram {
    pub functions: Vec<DFunction>,
    pub main: DExpr,
}

pub fn lower_type(t: &SType) -> Ty {
    match t {
        SType::Bool => Ty::Bool,
        SType::Int(w) => int_ty(w.expect("type checker resolves widths")),
        SType::Pair(a, b) => Ty::pair(lower_type(a), lower_type(b)),
    }
}

fn int_width(e: &SExpr) -> u32 {
    match e.ty {
        Some(SType::Int(Some(w))) => w,
        _ => panic!("desugar called on an untyped integer expression"),
    }
}

struct Lowerer<'a> {
    fresh: &'a Cell<usize>,
    pos: Pos,
}

impl Lowerer<'_> {
    fn mk(&self, kind: DKind) -> DExpr {
        DExpr { kind, pos: self.pos }
    }

    fn name(&self) -> Arc<str> {
        let n = self.fresh.get();
        self.fresh.set(n + 1);
        format!("%{n}").into()
    }

    fn val(&self, v: Value) -> DExpr {
        self.mk(DKind::Val(v))
    }

    fn var(&self, x: &Arc<str>) -> DExpr {
        self.mk(DKind::Var(x.clone()))
    }

    fn ite(&self, c: DExpr, t: DExpr, e: DExpr) -> DExpr {
        self.mk(DKind::If(Box::new(c), Box::new(t), Box::new(e)))
    }

    fn let_(&self, x: Arc<str>, a: DExpr, b: DExpr) -> DExpr {
        self.mk(DKind::Let(x, Box::new(a), Box::new(b)))
    }

    fn pair(&self, a: DExpr, b: DExpr) -> DExpr {
        self.mk(DKind::Pair(Box::new(a), Box::new(b)))
    }

    fn fst(&self, a: DExpr) -> DExpr {
        self.mk(DKind::Fst(Box::new(a)))
    }

    fn snd(&self, a: DExpr) -> DExpr {
        self.mk(DKind::Snd(Box::new(a)))
    }

    // Gates over already-evaluated operands (variables or values).
    fn not(&self, a: DExpr) -> DExpr {
        self.ite(a, self.val(Value::F), self.val(Value::T))
    }

    fn and(&self, a: DExpr, b: DExpr) -> DExpr {
        self.ite(a, b, self.val(Value::F))
    }

    fn or(&self, a: DExpr, b: DExpr) -> DExpr {
        self.ite(a, self.val(Value::T), b)
    }

    fn iff(&self, a: DExpr, b: DExpr) -> DExpr {
        let nb = self.not(b.clone());
        self.ite(a, b, nb)
    }

    fn xor(&self, a: DExpr, b: DExpr) -> DExpr {
        let nb = self.not(b.clone());
        self.ite(a, nb, b)
    }

    /// Evaluates `a` then `b`, binds both, and hands the variables to `k`.
    fn both(&self, a: DExpr, b: DExpr, k: impl FnOnce(DExpr, DExpr) -> DExpr) -> DExpr {
        let x = self.name();
        let y = self.name();
        let body = k(self.var(&x), self.var(&y));
        self.let_(x, a, self.let_(y, b, body))
    }

    /// Bit `i` (0 = most significant) of a `w`-bit integer held in `x`.
    fn bit(&self, x: &DExpr, w: u32, i: u32) -> DExpr {
        let mut e = x.clone();
        for _ in 0..i {
            e = self.snd(e);
        }
        if i + 1 < w {
            self.fst(e)
        } else {
            e
        }
    }

    fn join_bits(&self, bits: Vec<DExpr>) -> DExpr {
        let mut it = bits.into_iter().rev();
        let mut acc = it.next().expect("at least one bit");
        for b in it {
            acc = self.pair(b, acc);
        }
        acc
    }

    /// Ripple-carry `x + y + carry_in` (mod 2^w), or `x - y` when `sub`.
    fn add(&self, x: DExpr, y: DExpr, w: u32, sub: bool) -> DExpr {
        let mut binds: Vec<(Arc<str>, DExpr)> = Vec::new();
        let mut carry = self.val(Value::bool(sub));
        let mut sums = Vec::with_capacity(w as usize);
        for i in (0..w).rev() {
            let xi = self.bit(&x, w, i);
            let mut yi = self.bit(&y, w, i);
            if sub {
                let n = self.name();
                binds.push((n.clone(), self.not(yi)));
                yi = self.var(&n);
            }
            let p = self.name();
            binds.push((p.clone(), self.xor(xi.clone(), yi.clone())));
            let s = self.name();
            binds.push((s.clone(), self.xor(self.var(&p), carry.clone())));
            sums.push(self.var(&s));
            if i > 0 {
                let c = self.name();
                let gen = self.and(xi, yi);
                let prop = self.and(self.var(&p), carry);
                let g = self.name();
                binds.push((g.clone(), gen));
                let q = self.name();
                binds.push((q.clone(), prop));
                binds.push((c.clone(), self.or(self.var(&g), self.var(&q))));
                carry = self.var(&c);
            }
        }
        sums.reverse();
        let mut out = self.join_bits(sums);
        for (n, e) in binds.into_iter().rev() {
            out = self.let_(n, e, out);
        }
        out
    }

    /// Unsigned `x < y`, scanning from the least significant bit.
    fn less(&self, x: DExpr, y: DExpr, w: u32) -> DExpr {
        let mut binds: Vec<(Arc<str>, DExpr)> = Vec::new();
        let mut lt = self.val(Value::F);
        for i in (0..w).rev() {
            let xi = self.bit(&x, w, i);
            let yi = self.bit(&y, w, i);
            let d = self.name();
            binds.push((d.clone(), self.and(self.not(xi.clone()), yi.clone())));
            let e = self.name();
            binds.push((e.clone(), self.iff(xi, yi)));
            let k = self.name();
            binds.push((k.clone(), self.and(self.var(&e), lt)));
            let l = self.name();
            binds.push((l.clone(), self.or(self.var(&d), self.var(&k))));
            lt = self.var(&l);
        }
        let mut out = lt;
        for (n, e) in binds.into_iter().rev() {
            out = self.let_(n, e, out);
        }
        out
    }

    /// Structural equality at type `ty`.
    fn equal(&self, x: DExpr, y: DExpr, ty: &Ty) -> DExpr {
        match ty {
            Ty::Bool => self.iff(x, y),
            Ty::Product(ta, tb) => {
                let l = self.name();
                let r = self.name();
                let left = self.equal(self.fst(x.clone()), self.fst(y.clone()), ta);
                let right = self.equal(self.snd(x), self.snd(y), tb);
                self.let_(l.clone(), left, self.let_(r.clone(), right, self.and(self.var(&l), self.var(&r))))
            }
        }
    }

    /// Split tree over `[lo, hi)`; `nondet` selects `nflip` at each split.
    fn range(&self, lo: u64, hi: u64, w: u32, nondet: bool) -> DExpr {
        let n = hi - lo;
        if n == 1 {
            return self.val(int_value(w, lo));
        }
        let k = n / 2;
        let coin = if nondet { self.mk(DKind::NFlip) } else { self.mk(DKind::Flip(ratio(k as i64, n as i64))) };
        self.ite(coin, self.range(lo, lo + k, w, nondet), self.range(lo + k, hi, w, nondet))
    }
}

fn lower(e: &SExpr, fresh: &Cell<usize>) -> Result<DExpr> {
    let l = Lowerer { fresh, pos: e.pos };
    Ok(match &e.kind {
        SKind::Bool(b) => l.val(Value::bool(*b)),
        SKind::Int(n) => l.val(int_value(int_width(e), *n)),
        SKind::Var(x) => l.var(x),
        SKind::Pair(a, b) => l.pair(lower(a, fresh)?, lower(b, fresh)?),
        SKind::Fst(a) => l.fst(lower(a, fresh)?),
        SKind::Snd(a) => l.snd(lower(a, fresh)?),
        SKind::If(c, t, f) => l.ite(lower(c, fresh)?, lower(t, fresh)?, lower(f, fresh)?),
        SKind::Let(x, a, b) => l.let_(x.clone(), lower(a, fresh)?, lower(b, fresh)?),
        SKind::Call(f, args) => {
            let mut lowered = args.iter().map(|a| lower(a, fresh)).collect::<Result<Vec<_>>>()?;
            let arg = match lowered.len() {
                0 => l.val(Value::T),
                _ => {
                    let mut acc = lowered.pop().unwrap();
                    while let Some(prev) = lowered.pop() {
                        acc = l.pair(prev, acc);
                    }
                    acc
                }
            };
            l.mk(DKind::Call(f.clone(), Box::new(arg)))
        }
        SKind::Flip(q) => l.mk(DKind::Flip(q.clone())),
        SKind::NFlip => l.mk(DKind::NFlip),
        SKind::Observe(a) => l.mk(DKind::Observe(Box::new(lower(a, fresh)?))),
        SKind::Not(a) => {
            let x = l.name();
            let body = l.not(l.var(&x));
            l.let_(x, lower(a, fresh)?, body)
        }
        SKind::Uniform(lo, hi) | SKind::Choose(lo, hi) => {
            if hi <= lo {
                return Err(Error::Desugar { pos: e.pos, msg: format!("empty range [{lo}, {hi})") });
            }
            l.range(*lo, *hi, int_width(e), matches!(e.kind, SKind::Choose(..)))
        }
        SKind::Binary(op, a, b) => {
            let la = lower(a, fresh)?;
            let lb = lower(b, fresh)?;
            let operand_ty = lower_type(a.ty.as_ref().expect("typed operand"));
            match op {
                BinOp::And => l.both(la, lb, |x, y| l.and(x, y)),
                BinOp::Or => l.both(la, lb, |x, y| l.or(x, y)),
                BinOp::Iff => l.both(la, lb, |x, y| l.iff(x, y)),
                BinOp::Xor => l.both(la, lb, |x, y| l.xor(x, y)),
                BinOp::Eq => l.both(la, lb, |x, y| l.equal(x, y, &operand_ty)),
                BinOp::Ne => l.both(la, lb, |x, y| {
                    let r = l.name();
                    let eq = l.equal(x, y, &operand_ty);
                    l.let_(r.clone(), eq, l.not(l.var(&r)))
                }),
                BinOp::Add => l.both(la, lb, |x, y| l.add(x, y, int_width(a), false)),
                BinOp::Sub => l.both(la, lb, |x, y| l.add(x, y, int_width(a), true)),
                BinOp::Lt => l.both(la, lb, |x, y| l.less(x, y, int_width(a))),
                BinOp::Gt => l.both(la, lb, |x, y| l.less(y, x, int_width(a))),
                BinOp::Le => l.both(la, lb, |x, y| {
                    let r = l.name();
                    let gt = l.less(y, x, int_width(a));
                    l.let_(r.clone(), gt, l.not(l.var(&r)))
                }),
                BinOp::Ge => l.both(la, lb, |x, y| {
                    let r = l.name();
                    let lt = l.less(x, y, int_width(a));
                    l.let_(r.clone(), lt, l.not(l.var(&r)))
                }),
            }
        }
    })
}

/// Lowers a type-checked program. Multi-parameter functions take one tuple
/// argument that the body projects back into the named parameters.
pub fn desugar(p: &SurfaceProgram) -> Result<DProgram> {
    let fresh = Cell::new(0);
    let mut functions = Vec::new();
    for f in &p.functions {
        let mut body = lower(&f.body, &fresh)?;
        let ret_ty = lower_type(&f.ret);
        let (param, param_ty): (Arc<str>, Ty) = match f.params.len() {
            0 => ("%unit".into(), Ty::Bool),
            1 => (f.params[0].name.clone(), lower_type(&f.params[0].ty)),
            n => {
                let arg: Arc<str> = "%arg".into();
                let l = Lowerer { fresh: &fresh, pos: f.pos };
                let mut path = l.var(&arg);
                let mut projections = Vec::new();
                for (i, prm) in f.params.iter().enumerate() {
                    let proj = if i + 1 == n { path.clone() } else { l.fst(path.clone()) };
                    projections.push((prm.name.clone(), proj));
                    path = l.snd(path);
                }
                for (name, proj) in projections.into_iter().rev() {
                    body = l.let_(name, proj, body);
                }
                let mut tys: Vec<Ty> = f.params.iter().map(|p| lower_type(&p.ty)).collect();
                let mut ty = tys.pop().unwrap();
                while let Some(prev) = tys.pop() {
                    ty = Ty::pair(prev, ty);
                }
                (arg, ty)
            }
        };
        functions.push(DFunction { name: f.name.clone(), param, param_ty, ret_ty, body });
    }
    let main = lower(&p.main, &fresh)?;
    Ok(DProgram { functions, main })
}
