//! Static checking of surface programs. Every expression gets a fully
//! resolved `SType`; bare `int` becomes `int<W>` where `W` is the program's
//! default width.

use std::collections::HashMap;
use std::sync::Arc;

use super::ast::{BinOp, SExpr, SFunction, SKind, SType, SurfaceProgram};
use crate::error::{Error, Result};
use crate::lang::Pos;

/// Bits needed for the largest integer constant the program mentions
/// (`uniform`/`choose` count their largest outcome), at least 1.
pub fn default_width(p: &SurfaceProgram) -> u32 {
    fn visit(e: &SExpr, max: &mut u64) {
        match &e.kind {
            SKind::Int(n) => *max = (*max).max(*n),
            SKind::Uniform(_, hi) | SKind::Choose(_, hi) => *max = (*max).max(hi.saturating_sub(1)),
            SKind::Bool(_) | SKind::Var(_) | SKind::Flip(_) | SKind::NFlip => {}
            SKind::Pair(a, b) | SKind::Let(_, a, b) | SKind::Binary(_, a, b) => {
                visit(a, max);
                visit(b, max);
            }
            SKind::Fst(a) | SKind::Snd(a) | SKind::Observe(a) | SKind::Not(a) => visit(a, max),
            SKind::If(c, t, f) => {
                visit(c, max);
                visit(t, max);
                visit(f, max);
            }
            SKind::Call(_, args) => args.iter().for_each(|a| visit(a, max)),
        }
    }
    let mut max = 0;
    for f in &p.functions {
        visit(&f.body, &mut max);
    }
    visit(&p.main, &mut max);
    (64 - max.leading_zeros()).max(1)
}

fn resolve(ty: &SType, w: u32) -> SType {
    match ty {
        SType::Bool => SType::Bool,
        SType::Int(n) => SType::Int(Some(n.unwrap_or(w))),
        SType::Pair(a, b) => SType::pair(resolve(a, w), resolve(b, w)),
    }
}

struct Signature {
    params: Vec<SType>,
    ret: SType,
}

struct Checker {
    width: u32,
    sigs: HashMap<Arc<str>, Signature>,
    env: Vec<(Arc<str>, SType)>,
}

fn type_err<T>(pos: Pos, msg: impl Into<String>) -> Result<T> {
    Err(Error::Type { pos, msg: msg.into() })
}

/// Integer literals and `uniform`/`choose` take their width from context.
fn flexible(e: &SExpr) -> bool {
    matches!(e.kind, SKind::Int(_) | SKind::Uniform(..) | SKind::Choose(..))
}

fn fits(n: u64, w: u32) -> bool {
    w >= 64 || n < (1u64 << w)
}

impl Checker {
    fn lookup(&self, x: &str) -> Option<&SType> {
        self.env.iter().rev().find(|(n, _)| &**n == x).map(|(_, t)| t)
    }

    fn expect_eq(&self, got: &SType, want: &SType, pos: Pos, what: &str) -> Result<()> {
        if got == want {
            Ok(())
        } else {
            type_err(pos, format!("{what}: expected {want}, found {got}"))
        }
    }

    fn int_width(&self, expected: Option<&SType>) -> u32 {
        match expected {
            Some(SType::Int(Some(w))) => *w,
            _ => self.width,
        }
    }

    /// Infers the type of `e`, using `expected` only to size integer sugar.
    fn check(&mut self, e: &mut SExpr, expected: Option<&SType>) -> Result<SType> {
        let pos = e.pos;
        let ty = match &mut e.kind {
            SKind::Bool(_) => SType::Bool,
            SKind::Int(n) => {
                let w = self.int_width(expected);
                if !fits(*n, w) {
                    return type_err(pos, format!("integer literal {n} does not fit in {w} bits"));
                }
                SType::Int(Some(w))
            }
            SKind::Uniform(lo, hi) | SKind::Choose(lo, hi) => {
                let w = self.int_width(expected);
                if *hi > *lo && !fits(*hi - 1, w) {
                    return type_err(pos, format!("range bound {} does not fit in {w} bits", *hi - 1));
                }
                SType::Int(Some(w))
            }
            SKind::Var(x) => match self.lookup(x) {
                Some(t) => t.clone(),
                None => return type_err(pos, format!("unbound variable `{x}`")),
            },
            SKind::Pair(a, b) => {
                let (ea, eb) = match expected {
                    Some(SType::Pair(ea, eb)) => (Some(&**ea), Some(&**eb)),
                    _ => (None, None),
                };
                let ta = self.check(a, ea)?;
                let tb = self.check(b, eb)?;
                SType::pair(ta, tb)
            }
            SKind::Fst(a) => match self.check(a, None)? {
                SType::Pair(l, _) => *l,
                other => return type_err(pos, format!("fst expects a tuple, found {other}")),
            },
            SKind::Snd(a) => match self.check(a, None)? {
                SType::Pair(_, r) => *r,
                other => return type_err(pos, format!("snd expects a tuple, found {other}")),
            },
            SKind::If(c, t, f) => {
                let tc = self.check(c, Some(&SType::Bool))?;
                self.expect_eq(&tc, &SType::Bool, c.pos, "if guard")?;
                if flexible(t) && !flexible(f) {
                    let tf = self.check(f, expected)?;
                    let tt = self.check(t, Some(&tf))?;
                    self.expect_eq(&tt, &tf, t.pos, "if branches differ")?;
                    tf
                } else {
                    let tt = self.check(t, expected)?;
                    let tf = self.check(f, Some(&tt))?;
                    self.expect_eq(&tf, &tt, f.pos, "if branches differ")?;
                    tt
                }
            }
            SKind::Let(x, a, b) => {
                let ta = self.check(a, None)?;
                self.env.push((x.clone(), ta));
                let tb = self.check(b, expected);
                self.env.pop();
                tb?
            }
            SKind::Call(name, args) => {
                let Some(sig) = self.sigs.get(name) else {
                    return type_err(pos, format!("call to undefined or later-defined function `{name}`"));
                };
                if sig.params.len() != args.len() {
                    return type_err(
                        pos,
                        format!("`{name}` takes {} argument(s), given {}", sig.params.len(), args.len()),
                    );
                }
                let params = sig.params.clone();
                let ret = sig.ret.clone();
                for (arg, want) in args.iter_mut().zip(&params) {
                    let got = self.check(arg, Some(want))?;
                    self.expect_eq(&got, want, arg.pos, &format!("argument to `{name}`"))?;
                }
                ret
            }
            SKind::Flip(_) | SKind::NFlip => SType::Bool,
            SKind::Observe(a) => {
                let ta = self.check(a, Some(&SType::Bool))?;
                if ta != SType::Bool {
                    return type_err(a.pos, format!("observe expects Bool, found {ta}"));
                }
                SType::Bool
            }
            SKind::Not(a) => {
                let ta = self.check(a, Some(&SType::Bool))?;
                self.expect_eq(&ta, &SType::Bool, a.pos, "operand of !")?;
                SType::Bool
            }
            SKind::Binary(op, a, b) => {
                let op = *op;
                match op {
                    BinOp::And | BinOp::Or | BinOp::Iff | BinOp::Xor => {
                        let ta = self.check(a, Some(&SType::Bool))?;
                        self.expect_eq(&ta, &SType::Bool, a.pos, &format!("operand of {}", op.symbol()))?;
                        let tb = self.check(b, Some(&SType::Bool))?;
                        self.expect_eq(&tb, &SType::Bool, b.pos, &format!("operand of {}", op.symbol()))?;
                        SType::Bool
                    }
                    _ => {
                        let arith = matches!(op, BinOp::Add | BinOp::Sub);
                        let hint = if arith { expected } else { None };
                        let (ta, tb) = if flexible(a) && !flexible(b) {
                            let tb = self.check(b, hint)?;
                            let ta = self.check(a, Some(&tb))?;
                            (ta, tb)
                        } else {
                            let ta = self.check(a, hint)?;
                            let tb = self.check(b, Some(&ta))?;
                            (ta, tb)
                        };
                        self.expect_eq(&tb, &ta, b.pos, &format!("operands of {}", op.symbol()))?;
                        match op {
                            BinOp::Eq | BinOp::Ne => SType::Bool,
                            _ => {
                                if !matches!(ta, SType::Int(_)) {
                                    return type_err(a.pos, format!("{} expects integers, found {ta}", op.symbol()));
                                }
                                if arith {
                                    ta
                                } else {
                                    SType::Bool
                                }
                            }
                        }
                    }
                }
            }
        };
        e.ty = Some(ty.clone());
        Ok(ty)
    }

    fn function(&mut self, f: &mut SFunction) -> Result<()> {
        if self.sigs.contains_key(&f.name) {
            return type_err(f.pos, format!("duplicate function `{}`", f.name));
        }
        for (i, p) in f.params.iter().enumerate() {
            if f.params[..i].iter().any(|q| q.name == p.name) {
                return type_err(p.pos, format!("duplicate parameter `{}`", p.name));
            }
        }
        for p in &mut f.params {
            p.ty = resolve(&p.ty, self.width);
        }
        f.ret = resolve(&f.ret, self.width);
        self.env = f.params.iter().map(|p| (p.name.clone(), p.ty.clone())).collect();
        let ret = f.ret.clone();
        let got = self.check(&mut f.body, Some(&ret))?;
        self.expect_eq(&got, &ret, f.body.pos, &format!("body of `{}`", f.name))?;
        self.env.clear();
        self.sigs.insert(f.name.clone(), Signature { params: f.params.iter().map(|p| p.ty.clone()).collect(), ret });
        Ok(())
    }
}

/// Annotates every subexpression with its type. Functions may only call
/// functions defined before them, which rules out recursion.
pub fn typecheck(mut p: SurfaceProgram) -> Result<SurfaceProgram> {
    let mut c = Checker { width: default_width(&p), sigs: HashMap::new(), env: Vec::new() };
    for f in &mut p.functions {
        c.function(f)?;
    }
    c.check(&mut p.main, None)?;
    Ok(p)
}
