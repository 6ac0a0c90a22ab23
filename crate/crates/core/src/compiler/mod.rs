//! Compilation of core programs to a model formula tuple, an accepting
//! formula and a flip trace.

mod dump;
mod reduce;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::dd::{BddRef, FormulaTuple, Store};
use crate::error::{Error, Result};
use crate::lang::{Atom, CoreExpr, CoreKind, CoreProgram, Pos, Rational, Ty};

pub use dump::{format_formula, format_theta, format_trace};
pub use reduce::{boolean_reduce, enumerate_output_values, DEFAULT_VALUE_CAP};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlipKind {
    Prob(Rational),
    Nondet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlipEntry {
    pub level: u32,
    pub kind: FlipKind,
    pub origin: Pos,
}

impl fmt::Display for FlipEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FlipKind::Prob(q) => write!(f, "f{}:{}", self.level + 1, format_theta(q)),
            FlipKind::Nondet => write!(f, "f{}:n", self.level + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledTriple {
    pub model: FormulaTuple,
    pub accept: BddRef,
    pub trace: Vec<FlipEntry>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompileOptions {
    /// Recompile function bodies at every call site instead of shifting a
    /// compiled template.
    pub inline_calls: bool,
}

/// A compiled function body over local levels `0..trace.len()`, with the
/// parameter bits at placeholder levels.
#[derive(Clone, Debug)]
pub struct Template {
    pub param: Arc<str>,
    pub placeholders: Vec<u32>,
    pub body: CompiledTriple,
}

pub type Env = Vec<(Arc<str>, FormulaTuple)>;

pub struct Compiler<'p> {
    pub store: Store,
    program: &'p CoreProgram,
    table: HashMap<Arc<str>, Template>,
    next_param: u32,
    options: CompileOptions,
}

/// Result of compiling a whole program. The store's level count equals the
/// trace length.
#[derive(Debug)]
pub struct Compilation {
    pub store: Store,
    pub triple: CompiledTriple,
}

fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}

fn lookup<'e>(env: &'e Env, x: &str) -> Result<&'e FormulaTuple> {
    match env.iter().rev().find(|(n, _)| &**n == x) {
        Some((_, t)) => Ok(t),
        None => internal(format!("unbound variable `{x}` during compilation")),
    }
}

impl<'p> Compiler<'p> {
    pub fn new(program: &'p CoreProgram, options: CompileOptions) -> Compiler<'p> {
        Compiler { store: Store::new(0), program, table: HashMap::new(), next_param: 0, options }
    }

    fn atom(&self, env: &Env, a: &Atom) -> Result<FormulaTuple> {
        match a {
            Atom::Val(v) => Ok(self.store.value_tuple(v)),
            Atom::Var(x) => lookup(env, x).cloned(),
        }
    }

    fn atom_leaf(&self, env: &Env, a: &Atom) -> Result<BddRef> {
        match self.atom(env, a)? {
            FormulaTuple::Leaf(r) => Ok(r),
            FormulaTuple::Pair(..) => internal("boolean atom has tuple formula"),
        }
    }

    fn fresh_level(&mut self, counter: &mut u32) -> Result<BddRef> {
        let level = *counter;
        *counter += 1;
        self.store.reserve_levels(*counter);
        Ok(self.store.var(level)?)
    }

    /// Compiles `e` under `env`, allocating flip levels from `counter`.
    pub fn compile_expr(&mut self, env: &mut Env, counter: &mut u32, e: &CoreExpr) -> Result<CompiledTriple> {
        crate::dd::deep(|| self.compile_inner(env, counter, e))
    }

    fn compile_inner(&mut self, env: &mut Env, counter: &mut u32, e: &CoreExpr) -> Result<CompiledTriple> {
        let tt = self.store.tt();
        let plain = |model| CompiledTriple { model, accept: tt, trace: Vec::new() };
        Ok(match &e.kind {
            CoreKind::Atom(a) => plain(self.atom(env, a)?),
            CoreKind::Tuple(a, b) => plain(FormulaTuple::pair(self.atom(env, a)?, self.atom(env, b)?)),
            CoreKind::Fst(a) | CoreKind::Snd(a) => {
                let t = self.atom(env, a)?;
                let part = if matches!(e.kind, CoreKind::Fst(_)) { t.fst() } else { t.snd() };
                match part {
                    Some(p) => plain(p.clone()),
                    None => return internal("projection of a boolean formula"),
                }
            }
            CoreKind::Flip(q) => {
                let level = *counter;
                let f = self.fresh_level(counter)?;
                CompiledTriple {
                    model: FormulaTuple::Leaf(f),
                    accept: tt,
                    trace: vec![FlipEntry { level, kind: FlipKind::Prob(q.clone()), origin: e.pos }],
                }
            }
            CoreKind::NFlip => {
                let level = *counter;
                let f = self.fresh_level(counter)?;
                CompiledTriple {
                    model: FormulaTuple::Leaf(f),
                    accept: tt,
                    trace: vec![FlipEntry { level, kind: FlipKind::Nondet, origin: e.pos }],
                }
            }
            CoreKind::Observe(a) => {
                let g = self.atom_leaf(env, a)?;
                CompiledTriple { model: FormulaTuple::Leaf(tt), accept: g, trace: Vec::new() }
            }
            CoreKind::If(g, t, f) => {
                let g = self.atom_leaf(env, g)?;
                let ct = self.compile_expr(env, counter, t)?;
                let cf = self.compile_expr(env, counter, f)?;
                let model = self.store.tuple_ite(g, &ct.model, &cf.model)?;
                let accept = self.store.ite(g, ct.accept, cf.accept)?;
                let mut trace = ct.trace;
                trace.extend(cf.trace);
                CompiledTriple { model, accept, trace }
            }
            CoreKind::Let(x, a, b) => {
                let ca = self.compile_expr(env, counter, a)?;
                env.push((x.clone(), ca.model));
                let cb = self.compile_expr(env, counter, b);
                env.pop();
                let cb = cb?;
                let accept = self.store.and(ca.accept, cb.accept)?;
                let mut trace = ca.trace;
                trace.extend(cb.trace);
                CompiledTriple { model: cb.model, accept, trace }
            }
            CoreKind::Call(name, arg) => {
                let arg = self.atom(env, arg)?;
                self.call(name, arg, counter, e.pos)?
            }
        })
    }

    fn call(&mut self, name: &Arc<str>, arg: FormulaTuple, counter: &mut u32, pos: Pos) -> Result<CompiledTriple> {
        let program = self.program;
        let Some(func) = program.function(name) else {
            return internal(format!("call to unknown function `{name}` at {pos}"));
        };
        if self.options.inline_calls {
            let mut env = vec![(func.param.clone(), arg)];
            return self.compile_expr(&mut env, counter, &func.body);
        }
        let template = self.template(name)?;
        let base = *counter;
        *counter += template.body.trace.len() as u32;
        self.store.reserve_levels(*counter);
        let offset = i64::from(base);
        let subst: Vec<(u32, BddRef)> = template.placeholders.iter().copied().zip(arg.leaves()).collect();
        let shifted = self.store.shift_tuple(&template.body.model, offset)?;
        let model = self.store.compose_tuple(&shifted, &subst)?;
        let shifted = self.store.shift_levels(template.body.accept, offset)?;
        let accept = match self.store.compose_tuple(&FormulaTuple::Leaf(shifted), &subst)? {
            FormulaTuple::Leaf(r) => r,
            FormulaTuple::Pair(..) => unreachable!(),
        };
        let trace = template
            .body
            .trace
            .iter()
            .map(|t| FlipEntry { level: t.level + base, kind: t.kind.clone(), origin: t.origin })
            .collect();
        Ok(CompiledTriple { model, accept, trace })
    }

    /// Compiles a function body once over local levels.
    fn template(&mut self, name: &Arc<str>) -> Result<Template> {
        if let Some(t) = self.table.get(name) {
            return Ok(t.clone());
        }
        let func = self.program.function(name).expect("checked by caller");
        let width = func.param_ty.width() as u32;
        let placeholders: Vec<u32> =
            (self.next_param..self.next_param + width).map(|i| crate::dd::PARAM_BASE + i).collect();
        let bits: Vec<BddRef> = (self.next_param..self.next_param + width).map(|i| self.store.param_var(i)).collect();
        self.next_param += width;
        let param = FormulaTuple::rebuild(&func.param_ty, &mut bits.into_iter());
        let mut env = vec![(func.param.clone(), param)];
        let mut local = 0u32;
        let body = self.compile_expr(&mut env, &mut local, &func.body)?;
        let t = Template { param: func.param.clone(), placeholders, body };
        self.table.insert(name.clone(), t.clone());
        Ok(t)
    }

    /// Compiles every function (in declaration order) and then main.
    pub fn compile_program(mut self) -> Result<Compilation> {
        let program = self.program;
        if !self.options.inline_calls {
            for f in &program.functions {
                self.template(&f.name)?;
            }
        }
        let mut env = Env::new();
        let mut counter = 0u32;
        let triple = self.compile_expr(&mut env, &mut counter, &program.main)?;
        self.store.set_level_count(counter);
        Ok(Compilation { store: self.store, triple })
    }
}

pub fn compile_program(p: &CoreProgram, options: CompileOptions) -> Result<Compilation> {
    Compiler::new(p, options).compile_program()
}

impl Compilation {
    /// Output type of the compiled expression.
    pub fn ty(&self) -> Ty {
        self.triple.model.ty()
    }
}

#[cfg(test)]
mod tests;
