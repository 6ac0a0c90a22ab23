use std::collections::HashMap;
use std::sync::Arc;

use super::Outcome;
use crate::compiler::FlipKind;
use crate::error::{Error, Result};
use crate::lang::{Atom, CoreExpr, CoreKind, CoreProgram, Value};

enum Stop {
    Need(FlipKind),
    Fail(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Stop {
        Stop::Fail(e)
    }
}

type Env = Vec<(Arc<str>, Value)>;

/// Big-step interpreter with calls evaluated by substituting the argument
/// into the callee body. `counter` tracks the flip level each occurrence
/// would receive from the compiler (then-branches first, callee flips as a
/// contiguous block), so an assignment over levels can drive execution.
struct Interp<'p, S> {
    program: &'p CoreProgram,
    source: S,
    counter: u32,
    sizes: HashMap<Arc<str>, u32>,
}

fn bug(msg: impl Into<String>) -> Stop {
    Stop::Fail(Error::Internal(msg.into()))
}

/// Flips in `e`, counting each call as the flips of the callee body.
pub fn flip_count(p: &CoreProgram, e: &CoreExpr) -> u32 {
    let mut sizes = HashMap::new();
    count(p, e, &mut sizes)
}

fn count(p: &CoreProgram, e: &CoreExpr, sizes: &mut HashMap<Arc<str>, u32>) -> u32 {
    match &e.kind {
        CoreKind::Flip(_) | CoreKind::NFlip => 1,
        CoreKind::If(_, t, f) => count(p, t, sizes) + count(p, f, sizes),
        CoreKind::Let(_, a, b) => count(p, a, sizes) + count(p, b, sizes),
        CoreKind::Call(name, _) => {
            if let Some(&n) = sizes.get(name) {
                return n;
            }
            let n = p.function(name).map_or(0, |f| count(p, &f.body, sizes));
            sizes.insert(name.clone(), n);
            n
        }
        _ => 0,
    }
}

impl<S: FnMut(u32, &FlipKind) -> Option<bool>> Interp<'_, S> {
    fn atom(&self, env: &Env, a: &Atom) -> Result<Value, Stop> {
        match a {
            Atom::Val(v) => Ok(v.clone()),
            Atom::Var(x) => match env.iter().rev().find(|(n, _)| n == x) {
                Some((_, v)) => Ok(v.clone()),
                None => Err(bug(format!("unbound variable `{x}`"))),
            },
        }
    }

    fn size(&mut self, e: &CoreExpr) -> u32 {
        count(self.program, e, &mut self.sizes)
    }

    fn flip(&mut self, kind: FlipKind) -> Result<Outcome, Stop> {
        let level = self.counter;
        self.counter += 1;
        match (self.source)(level, &kind) {
            Some(b) => Ok(Outcome::Val(Value::bool(b))),
            None => Err(Stop::Need(kind)),
        }
    }

    fn eval(&mut self, env: &mut Env, e: &CoreExpr) -> Result<Outcome, Stop> {
        match &e.kind {
            CoreKind::Atom(a) => Ok(Outcome::Val(self.atom(env, a)?)),
            CoreKind::Tuple(a, b) => Ok(Outcome::Val(Value::pair(self.atom(env, a)?, self.atom(env, b)?))),
            CoreKind::Fst(a) | CoreKind::Snd(a) => match self.atom(env, a)? {
                Value::Pair(x, y) => Ok(Outcome::Val(if matches!(e.kind, CoreKind::Fst(_)) { *x } else { *y })),
                _ => Err(bug("projection of a non-pair")),
            },
            CoreKind::Flip(q) => self.flip(FlipKind::Prob(q.clone())),
            CoreKind::NFlip => self.flip(FlipKind::Nondet),
            CoreKind::Observe(a) => match self.atom(env, a)? {
                Value::T => Ok(Outcome::Val(Value::T)),
                Value::F => Ok(Outcome::Reject),
                _ => Err(bug("observe of a pair")),
            },
            CoreKind::If(g, t, f) => {
                let taken = match self.atom(env, g)? {
                    Value::T => true,
                    Value::F => false,
                    _ => return Err(bug("if on a pair")),
                };
                if taken {
                    let r = self.eval(env, t)?;
                    self.counter += self.size(f);
                    Ok(r)
                } else {
                    self.counter += self.size(t);
                    self.eval(env, f)
                }
            }
            CoreKind::Let(x, a, b) => match self.eval(env, a)? {
                Outcome::Reject => Ok(Outcome::Reject),
                Outcome::Val(v) => {
                    env.push((x.clone(), v));
                    let r = self.eval(env, b);
                    env.pop();
                    r
                }
            },
            CoreKind::Call(name, arg) => {
                let v = self.atom(env, arg)?;
                let f = self.program.function(name).ok_or_else(|| bug(format!("undefined function `{name}`")))?;
                let mut inner = vec![(f.param.clone(), v)];
                self.eval(&mut inner, &f.body)
            }
        }
    }
}

pub(super) enum Replay {
    Done(Outcome),
    Need(FlipKind),
}

/// Runs `p` taking flip outcomes from `prefix` in execution order, stopping
/// at the first flip past its end.
pub(super) fn replay(p: &CoreProgram, prefix: &[bool]) -> Result<Replay> {
    let mut next = 0usize;
    let source = |_: u32, _: &FlipKind| {
        let b = prefix.get(next).copied();
        next += 1;
        b
    };
    let mut it = Interp { program: p, source, counter: 0, sizes: HashMap::new() };
    match it.eval(&mut Env::new(), &p.main) {
        Ok(o) => Ok(Replay::Done(o)),
        Err(Stop::Need(k)) => Ok(Replay::Need(k)),
        Err(Stop::Fail(e)) => Err(e),
    }
}

/// Runs `p` with every flip at compiler level `i` resolved to
/// `assignment[i]`.
pub fn execute(p: &CoreProgram, assignment: &[bool]) -> Result<Outcome> {
    let source = |level: u32, _: &FlipKind| assignment.get(level as usize).copied();
    let mut it = Interp { program: p, source, counter: 0, sizes: HashMap::new() };
    let r = crate::dd::deep(|| it.eval(&mut Env::new(), &p.main));
    match r {
        Ok(o) => Ok(o),
        Err(Stop::Need(_)) => Err(Error::Internal(format!("assignment of {} bits is too short", assignment.len()))),
        Err(Stop::Fail(e)) => Err(e),
    }
}
