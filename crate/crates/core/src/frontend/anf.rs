//! A-normalization: every guard, tuple component, projection, observe and
//! call argument becomes a variable or a value. Intermediate results are
//! let-bound left to right, so evaluation order is unchanged.

use std::collections::HashMap;
use std::sync::Arc;

use super::desugar::{DExpr, DKind, DProgram};
use crate::error::{Error, Result};
use crate::lang::{Atom, CoreExpr, CoreFunction, CoreKind, CoreProgram, Pos, Shape, Ty};

struct Normalizer {
    env: Vec<(Arc<str>, Ty)>,
    rets: HashMap<Arc<str>, (Ty, Ty)>,
    fresh: usize,
}

type Binds = Vec<(Arc<str>, CoreExpr)>;

fn internal<T>(pos: Pos, msg: String) -> Result<T> {
    Err(Error::Desugar { pos, msg })
}

impl Normalizer {
    fn lookup(&self, x: &str, pos: Pos) -> Result<Ty> {
        match self.env.iter().rev().find(|(n, _)| &**n == x) {
            Some((_, t)) => Ok(t.clone()),
            None => internal(pos, format!("unbound variable `{x}`")),
        }
    }

    fn atomize(&mut self, e: &DExpr, binds: &mut Binds) -> Result<(Atom, Ty)> {
        match &e.kind {
            DKind::Val(v) => Ok((Atom::Val(v.clone()), v.ty())),
            DKind::Var(x) => Ok((Atom::Var(x.clone()), self.lookup(x, e.pos)?)),
            _ => {
                let c = self.norm(e)?;
                let name: Arc<str> = format!("%a{}", self.fresh).into();
                self.fresh += 1;
                let ty = c.ty.clone();
                self.env.push((name.clone(), ty.clone()));
                binds.push((name.clone(), c));
                Ok((Atom::Var(name), ty))
            }
        }
    }

    fn wrap(&mut self, mut body: CoreExpr, binds: Binds) -> CoreExpr {
        for (name, bound) in binds.into_iter().rev() {
            self.env.pop();
            let pos = bound.pos;
            let ty = body.ty.clone();
            body = CoreExpr::new(CoreKind::Let(name, Box::new(bound), Box::new(body)), ty, pos);
        }
        body
    }

    fn norm(&mut self, e: &DExpr) -> Result<CoreExpr> {
        let pos = e.pos;
        let mut binds = Binds::new();
        let (kind, ty) = match &e.kind {
            DKind::Val(v) => (CoreKind::Atom(Atom::Val(v.clone())), v.ty()),
            DKind::Var(x) => (CoreKind::Atom(Atom::Var(x.clone())), self.lookup(x, pos)?),
            DKind::Pair(a, b) => {
                let (xa, ta) = self.atomize(a, &mut binds)?;
                let (xb, tb) = self.atomize(b, &mut binds)?;
                (CoreKind::Tuple(xa, xb), Ty::pair(ta, tb))
            }
            DKind::Fst(a) | DKind::Snd(a) => {
                let (xa, ta) = self.atomize(a, &mut binds)?;
                let Ty::Product(l, r) = ta else {
                    return internal(pos, format!("projection of non-tuple type {ta}"));
                };
                if matches!(e.kind, DKind::Fst(_)) {
                    (CoreKind::Fst(xa), *l)
                } else {
                    (CoreKind::Snd(xa), *r)
                }
            }
            DKind::If(c, t, f) => {
                let (xc, _) = self.atomize(c, &mut binds)?;
                let ct = self.norm(t)?;
                let cf = self.norm(f)?;
                if ct.ty != cf.ty {
                    return internal(pos, format!("branch types {} and {} differ", ct.ty, cf.ty));
                }
                let ty = ct.ty.clone();
                (CoreKind::If(xc, Box::new(ct), Box::new(cf)), ty)
            }
            DKind::Let(x, a, b) => {
                let ca = self.norm(a)?;
                self.env.push((x.clone(), ca.ty.clone()));
                let cb = self.norm(b);
                self.env.pop();
                let cb = cb?;
                let ty = cb.ty.clone();
                (CoreKind::Let(x.clone(), Box::new(ca), Box::new(cb)), ty)
            }
            DKind::Call(f, a) => {
                let Some((_, ret)) = self.rets.get(f).cloned() else {
                    return internal(pos, format!("unknown function `{f}`"));
                };
                let (xa, _) = self.atomize(a, &mut binds)?;
                (CoreKind::Call(f.clone(), xa), ret)
            }
            DKind::Flip(q) => (CoreKind::Flip(q.clone()), Ty::Bool),
            DKind::NFlip => (CoreKind::NFlip, Ty::Bool),
            DKind::Observe(a) => {
                let (xa, _) = self.atomize(a, &mut binds)?;
                (CoreKind::Observe(xa), Ty::Bool)
            }
        };
        Ok(self.wrap(CoreExpr::new(kind, ty, pos), binds))
    }
}

pub fn a_normalize(p: &DProgram, output: Shape) -> Result<CoreProgram> {
    let mut n = Normalizer { env: Vec::new(), rets: HashMap::new(), fresh: 0 };
    let mut functions = Vec::new();
    for f in &p.functions {
        n.env = vec![(f.param.clone(), f.param_ty.clone())];
        let body = n.norm(&f.body)?;
        if body.ty != f.ret_ty {
            return internal(body.pos, format!("`{}` returns {} but declares {}", f.name, body.ty, f.ret_ty));
        }
        n.rets.insert(f.name.clone(), (f.param_ty.clone(), f.ret_ty.clone()));
        functions.push(CoreFunction {
            name: f.name.clone(),
            param: f.param.clone(),
            param_ty: f.param_ty.clone(),
            ret_ty: f.ret_ty.clone(),
            body,
        });
    }
    n.env.clear();
    let main = n.norm(&p.main)?;
    Ok(CoreProgram { functions, main, output })
}
