use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::Outcome;
use crate::error::{Error, Result};
use crate::lang::{Atom, CoreExpr, CoreKind, CoreProgram, Value};

type Counts = HashMap<Outcome, u128>;

/// Number of execution paths of `e` ending in each outcome, memoized on the
/// expression and the values of its free variables.
struct Counter<'p> {
    program: &'p CoreProgram,
    free: HashMap<*const CoreExpr, Arc<Vec<Arc<str>>>>,
    memo: HashMap<(*const CoreExpr, Vec<Value>), Arc<Counts>>,
}

fn atom_vars(a: &Atom, out: &mut BTreeSet<Arc<str>>) {
    if let Atom::Var(x) = a {
        out.insert(x.clone());
    }
}

fn free_vars(e: &CoreExpr) -> BTreeSet<Arc<str>> {
    let mut out = BTreeSet::new();
    match &e.kind {
        CoreKind::Atom(a) | CoreKind::Fst(a) | CoreKind::Snd(a) | CoreKind::Observe(a) | CoreKind::Call(_, a) => {
            atom_vars(a, &mut out)
        }
        CoreKind::Tuple(a, b) => {
            atom_vars(a, &mut out);
            atom_vars(b, &mut out);
        }
        CoreKind::If(g, t, f) => {
            atom_vars(g, &mut out);
            out.extend(free_vars(t));
            out.extend(free_vars(f));
        }
        CoreKind::Let(x, a, b) => {
            out.extend(free_vars(a));
            let mut body = free_vars(b);
            body.remove(x);
            out.extend(body);
        }
        CoreKind::Flip(_) | CoreKind::NFlip => {}
    }
    out
}

fn add(into: &mut Counts, o: Outcome, n: u128) {
    let e = into.entry(o).or_insert(0);
    *e = e.saturating_add(n);
}

fn lookup(env: &[(Arc<str>, Value)], x: &str) -> Result<Value> {
    env.iter()
        .rev()
        .find(|(n, _)| &**n == x)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::Internal(format!("unbound variable `{x}`")))
}

impl Counter<'_> {
    fn atom(env: &[(Arc<str>, Value)], a: &Atom) -> Result<Value> {
        match a {
            Atom::Val(v) => Ok(v.clone()),
            Atom::Var(x) => lookup(env, x),
        }
    }

    fn paths(&mut self, env: &[(Arc<str>, Value)], e: &CoreExpr) -> Result<Arc<Counts>> {
        let key_ptr = e as *const CoreExpr;
        let free = match self.free.get(&key_ptr) {
            Some(f) => f.clone(),
            None => {
                let f = Arc::new(free_vars(e).into_iter().collect::<Vec<_>>());
                self.free.insert(key_ptr, f.clone());
                f
            }
        };
        let key_vals = free.iter().map(|x| lookup(env, x)).collect::<Result<Vec<_>>>()?;
        let key = (key_ptr, key_vals);
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let mut out = Counts::new();
        match &e.kind {
            CoreKind::Flip(_) | CoreKind::NFlip => {
                add(&mut out, Outcome::Val(Value::T), 1);
                add(&mut out, Outcome::Val(Value::F), 1);
            }
            CoreKind::Observe(a) => {
                let o = if Self::atom(env, a)? == Value::T { Outcome::Val(Value::T) } else { Outcome::Reject };
                add(&mut out, o, 1);
            }
            CoreKind::If(g, t, f) => {
                let branch = if Self::atom(env, g)? == Value::T { t } else { f };
                out = (*self.paths(env, branch)?).clone();
            }
            CoreKind::Let(x, a, b) => {
                let first = self.paths(env, a)?;
                let mut inner: Vec<(Arc<str>, Value)> =
                    free.iter().map(|n| Ok((n.clone(), lookup(env, n)?))).collect::<Result<_>>()?;
                for (o, &n) in first.iter() {
                    match o {
                        Outcome::Reject => add(&mut out, Outcome::Reject, n),
                        Outcome::Val(v) => {
                            inner.push((x.clone(), v.clone()));
                            let rest = self.paths(&inner, b)?;
                            inner.pop();
                            for (o2, &m) in rest.iter() {
                                add(&mut out, o2.clone(), n.saturating_mul(m));
                            }
                        }
                    }
                }
            }
            CoreKind::Call(name, a) => {
                let f = self
                    .program
                    .function(name)
                    .ok_or_else(|| Error::Internal(format!("undefined function `{name}`")))?;
                let inner = vec![(f.param.clone(), Self::atom(env, a)?)];
                out = (*self.paths(&inner, &f.body)?).clone();
            }
            CoreKind::Atom(a) => add(&mut out, Outcome::Val(Self::atom(env, a)?), 1),
            CoreKind::Tuple(a, b) => {
                add(&mut out, Outcome::Val(Value::pair(Self::atom(env, a)?, Self::atom(env, b)?)), 1)
            }
            CoreKind::Fst(a) | CoreKind::Snd(a) => {
                let v = match Self::atom(env, a)? {
                    Value::Pair(x, y) => {
                        if matches!(e.kind, CoreKind::Fst(_)) {
                            *x
                        } else {
                            *y
                        }
                    }
                    _ => return Err(Error::Internal("projection of a non-pair".into())),
                };
                add(&mut out, Outcome::Val(v), 1);
            }
        }
        let out = Arc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Number of leaves of the execution tree of `p`, without building it.
/// Saturates at `u128::MAX`.
pub fn exec_tree_leaf_count(p: &CoreProgram) -> Result<u128> {
    let mut c = Counter { program: p, free: HashMap::new(), memo: HashMap::new() };
    let counts = crate::dd::deep(|| c.paths(&[], &p.main))?;
    Ok(counts.values().fold(0u128, |a, &n| a.saturating_add(n)))
}
