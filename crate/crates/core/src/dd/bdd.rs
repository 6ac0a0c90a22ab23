use std::collections::HashMap;

use super::{deep, BddRef, FormulaTuple, Node, Store, FALSE, PARAM_BASE, TERMINAL_LEVEL, TRUE};
use crate::error::DdError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    And,
    Or,
    Xor,
    Iff,
}

impl Op {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Op::And => a && b,
            Op::Or => a || b,
            Op::Xor => a != b,
            Op::Iff => a == b,
        }
    }
}

/// Read-only view of one BDD node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BddView {
    Const(bool),
    Node { level: u32, hi: BddRef, lo: BddRef },
}

impl Store {
    pub fn tt(&self) -> BddRef {
        self.bdd(TRUE)
    }

    pub fn ff(&self) -> BddRef {
        self.bdd(FALSE)
    }

    pub fn constant(&self, b: bool) -> BddRef {
        if b {
            self.tt()
        } else {
            self.ff()
        }
    }

    pub fn view(&self, r: BddRef) -> Result<BddView, DdError> {
        let i = self.own(r)?;
        Ok(match i {
            FALSE => BddView::Const(false),
            TRUE => BddView::Const(true),
            _ => {
                let n = self.nodes[i as usize];
                BddView::Node { level: n.level, hi: self.bdd(n.hi), lo: self.bdd(n.lo) }
            }
        })
    }

    pub(super) fn mk(&mut self, level: u32, hi: u32, lo: u32) -> u32 {
        if hi == lo {
            return hi;
        }
        if let Some(&i) = self.unique.get(&(level, hi, lo)) {
            return i;
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(Node { level, hi, lo });
        self.unique.insert((level, hi, lo), i);
        i
    }

    pub(super) fn level_of(&self, i: u32) -> u32 {
        self.nodes[i as usize].level
    }

    fn cofactors(&self, i: u32, level: u32) -> (u32, u32) {
        let n = self.nodes[i as usize];
        if n.level == level {
            (n.hi, n.lo)
        } else {
            (i, i)
        }
    }

    /// The variable at `level`, which must be below the level count.
    pub fn var(&mut self, level: u32) -> Result<BddRef, DdError> {
        if level >= self.levels {
            return Err(DdError::LevelOutOfRange { level: level as i64, count: self.levels });
        }
        let i = self.mk(level, TRUE, FALSE);
        Ok(self.bdd(i))
    }

    /// Placeholder variable for bit `i` of a function parameter.
    pub fn param_var(&mut self, i: u32) -> BddRef {
        let n = self.mk(PARAM_BASE + i, TRUE, FALSE);
        self.bdd(n)
    }

    pub fn apply(&mut self, op: Op, a: BddRef, b: BddRef) -> Result<BddRef, DdError> {
        let (a, b) = (self.own(a)?, self.own(b)?);
        let r = self.apply_raw(op, a, b);
        Ok(self.bdd(r))
    }

    pub fn and(&mut self, a: BddRef, b: BddRef) -> Result<BddRef, DdError> {
        self.apply(Op::And, a, b)
    }

    pub fn or(&mut self, a: BddRef, b: BddRef) -> Result<BddRef, DdError> {
        self.apply(Op::Or, a, b)
    }

    pub fn neg(&mut self, a: BddRef) -> Result<BddRef, DdError> {
        let a = self.own(a)?;
        let r = self.apply_raw(Op::Xor, a, TRUE);
        Ok(self.bdd(r))
    }

    fn apply_raw(&mut self, op: Op, a: u32, b: u32) -> u32 {
        if a <= TRUE && b <= TRUE {
            return u32::from(op.eval(a == TRUE, b == TRUE));
        }
        match op {
            Op::And => {
                if a == FALSE || b == FALSE {
                    return FALSE;
                }
                if a == TRUE || a == b {
                    return b;
                }
                if b == TRUE {
                    return a;
                }
            }
            Op::Or => {
                if a == TRUE || b == TRUE {
                    return TRUE;
                }
                if a == FALSE || a == b {
                    return b;
                }
                if b == FALSE {
                    return a;
                }
            }
            Op::Xor => {
                if a == b {
                    return FALSE;
                }
                if a == FALSE {
                    return b;
                }
                if b == FALSE {
                    return a;
                }
            }
            Op::Iff => {
                if a == b {
                    return TRUE;
                }
                if a == TRUE {
                    return b;
                }
                if b == TRUE {
                    return a;
                }
            }
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.apply_cache.get(&(op, a, b)) {
            return r;
        }
        let level = self.level_of(a).min(self.level_of(b));
        let (a1, a0) = self.cofactors(a, level);
        let (b1, b0) = self.cofactors(b, level);
        let hi = deep(|| self.apply_raw(op, a1, b1));
        let lo = deep(|| self.apply_raw(op, a0, b0));
        let r = self.mk(level, hi, lo);
        self.apply_cache.insert((op, a, b), r);
        r
    }

    pub fn ite(&mut self, g: BddRef, t: BddRef, e: BddRef) -> Result<BddRef, DdError> {
        let (g, t, e) = (self.own(g)?, self.own(t)?, self.own(e)?);
        let r = self.ite_raw(g, t, e);
        Ok(self.bdd(r))
    }

    pub(super) fn ite_raw(&mut self, g: u32, t: u32, e: u32) -> u32 {
        if g == TRUE || t == e {
            return t;
        }
        if g == FALSE {
            return e;
        }
        if t == TRUE && e == FALSE {
            return g;
        }
        if t == FALSE && e == TRUE {
            return self.apply_raw(Op::Xor, g, TRUE);
        }
        if let Some(&r) = self.ite_cache.get(&(g, t, e)) {
            return r;
        }
        let level = self.level_of(g).min(self.level_of(t)).min(self.level_of(e));
        let (g1, g0) = self.cofactors(g, level);
        let (t1, t0) = self.cofactors(t, level);
        let (e1, e0) = self.cofactors(e, level);
        let hi = deep(|| self.ite_raw(g1, t1, e1));
        let lo = deep(|| self.ite_raw(g0, t0, e0));
        let r = self.mk(level, hi, lo);
        self.ite_cache.insert((g, t, e), r);
        r
    }

    /// `f` with `level` fixed to `value`.
    pub fn restrict(&mut self, f: BddRef, level: u32, value: bool) -> Result<BddRef, DdError> {
        let f = self.own(f)?;
        let mut memo = HashMap::new();
        let r = self.restrict_raw(f, level, value, &mut memo);
        Ok(self.bdd(r))
    }

    fn restrict_raw(&mut self, f: u32, level: u32, value: bool, memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.nodes[f as usize];
        if n.level == TERMINAL_LEVEL || n.level > level {
            return f;
        }
        if n.level == level {
            return if value { n.hi } else { n.lo };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let hi = deep(|| self.restrict_raw(n.hi, level, value, memo));
        let lo = deep(|| self.restrict_raw(n.lo, level, value, memo));
        let r = self.mk(n.level, hi, lo);
        memo.insert(f, r);
        r
    }

    /// Replaces every test of `level` in `f` by the function `g`.
    pub fn compose(&mut self, f: BddRef, level: u32, g: BddRef) -> Result<BddRef, DdError> {
        let (fi, gi) = (self.own(f)?, self.own(g)?);
        if let Some(&r) = self.compose_cache.get(&(fi, level, gi)) {
            return Ok(self.bdd(r));
        }
        let f1 = self.restrict(f, level, true)?;
        let f0 = self.restrict(f, level, false)?;
        let r = self.ite_raw(gi, f1.idx, f0.idx);
        self.compose_cache.insert((fi, level, gi), r);
        Ok(self.bdd(r))
    }

    /// Renames flip level `l` to `l + offset` throughout `f`. Placeholder
    /// levels are left alone.
    pub fn shift_levels(&mut self, f: BddRef, offset: i64) -> Result<BddRef, DdError> {
        let f = self.own(f)?;
        let mut memo = HashMap::new();
        let r = self.shift_raw(f, offset, &mut memo)?;
        Ok(self.bdd(r))
    }

    fn shift_raw(&mut self, f: u32, offset: i64, memo: &mut HashMap<u32, u32>) -> Result<u32, DdError> {
        if f <= TRUE {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.nodes[f as usize];
        let level = if n.level >= PARAM_BASE {
            n.level
        } else {
            let l = n.level as i64 + offset;
            if l < 0 || l >= PARAM_BASE as i64 {
                return Err(DdError::LevelOutOfRange { level: l, count: self.levels });
            }
            l as u32
        };
        let hi = deep(|| self.shift_raw(n.hi, offset, memo))?;
        let lo = deep(|| self.shift_raw(n.lo, offset, memo))?;
        let r = self.mk(level, hi, lo);
        memo.insert(f, r);
        Ok(r)
    }

    /// Evaluates `f` under a full assignment to the flip levels.
    pub fn eval_bdd(&self, f: BddRef, assignment: &[bool]) -> Result<bool, DdError> {
        let mut i = self.own(f)?;
        if assignment.len() != self.levels as usize {
            return Err(DdError::AssignmentLength { got: assignment.len(), expected: self.levels as usize });
        }
        while i > TRUE {
            let n = self.nodes[i as usize];
            let bit = *assignment
                .get(n.level as usize)
                .ok_or(DdError::LevelOutOfRange { level: n.level as i64, count: self.levels })?;
            i = if bit { n.hi } else { n.lo };
        }
        Ok(i == TRUE)
    }

    /// Nodes reachable from `f`, terminals included.
    pub fn bdd_size(&self, f: BddRef) -> Result<usize, DdError> {
        let root = self.own(f)?;
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if !seen.insert(i) {
                continue;
            }
            if i > TRUE {
                let n = self.nodes[i as usize];
                stack.push(n.hi);
                stack.push(n.lo);
            }
        }
        Ok(seen.len())
    }

    /// Levels tested anywhere in `f`.
    pub fn support(&self, f: BddRef) -> Result<Vec<u32>, DdError> {
        let root = self.own(f)?;
        let mut seen = std::collections::HashSet::new();
        let mut levels = std::collections::BTreeSet::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if i <= TRUE || !seen.insert(i) {
                continue;
            }
            let n = self.nodes[i as usize];
            levels.insert(n.level);
            stack.push(n.hi);
            stack.push(n.lo);
        }
        Ok(levels.into_iter().collect())
    }

    /// Checks the reduction invariants over the whole BDD table: no node with
    /// equal children, no duplicate triples, children strictly deeper.
    pub fn bdd_table_reduced(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.nodes.iter().skip(2).all(|n| {
            n.hi != n.lo
                && seen.insert((n.level, n.hi, n.lo))
                && self.nodes[n.hi as usize].level > n.level
                && self.nodes[n.lo as usize].level > n.level
        })
    }

    pub fn broadcast_and(&mut self, g: BddRef, t: &FormulaTuple) -> Result<FormulaTuple, DdError> {
        Ok(match t {
            FormulaTuple::Leaf(f) => FormulaTuple::Leaf(self.and(g, *f)?),
            FormulaTuple::Pair(a, b) => FormulaTuple::pair(self.broadcast_and(g, a)?, self.broadcast_and(g, b)?),
        })
    }

    pub fn pointwise_or(&mut self, a: &FormulaTuple, b: &FormulaTuple) -> Result<FormulaTuple, DdError> {
        Ok(match (a, b) {
            (FormulaTuple::Leaf(x), FormulaTuple::Leaf(y)) => FormulaTuple::Leaf(self.or(*x, *y)?),
            (FormulaTuple::Pair(a1, a2), FormulaTuple::Pair(b1, b2)) => {
                FormulaTuple::pair(self.pointwise_or(a1, b1)?, self.pointwise_or(a2, b2)?)
            }
            _ => return Err(DdError::ShapeMismatch),
        })
    }

    /// `(g ∧ a) ∨ (¬g ∧ b)` leaf-wise.
    pub fn tuple_ite(&mut self, g: BddRef, a: &FormulaTuple, b: &FormulaTuple) -> Result<FormulaTuple, DdError> {
        Ok(match (a, b) {
            (FormulaTuple::Leaf(x), FormulaTuple::Leaf(y)) => FormulaTuple::Leaf(self.ite(g, *x, *y)?),
            (FormulaTuple::Pair(a1, a2), FormulaTuple::Pair(b1, b2)) => {
                FormulaTuple::pair(self.tuple_ite(g, a1, b1)?, self.tuple_ite(g, a2, b2)?)
            }
            _ => return Err(DdError::ShapeMismatch),
        })
    }

    pub fn shift_tuple(&mut self, t: &FormulaTuple, offset: i64) -> Result<FormulaTuple, DdError> {
        Ok(match t {
            FormulaTuple::Leaf(f) => FormulaTuple::Leaf(self.shift_levels(*f, offset)?),
            FormulaTuple::Pair(a, b) => FormulaTuple::pair(self.shift_tuple(a, offset)?, self.shift_tuple(b, offset)?),
        })
    }

    /// Substitutes each `(level, replacement)` pair into every leaf of `t`.
    pub fn compose_tuple(&mut self, t: &FormulaTuple, subst: &[(u32, BddRef)]) -> Result<FormulaTuple, DdError> {
        Ok(match t {
            FormulaTuple::Leaf(f) => {
                let mut f = *f;
                for &(level, g) in subst {
                    f = self.compose(f, level, g)?;
                }
                FormulaTuple::Leaf(f)
            }
            FormulaTuple::Pair(a, b) => {
                FormulaTuple::pair(self.compose_tuple(a, subst)?, self.compose_tuple(b, subst)?)
            }
        })
    }

    /// Constant formula tuple for a value.
    pub fn value_tuple(&self, v: &crate::lang::Value) -> FormulaTuple {
        use crate::lang::Value;
        match v {
            Value::T => FormulaTuple::Leaf(self.tt()),
            Value::F => FormulaTuple::Leaf(self.ff()),
            Value::Pair(a, b) => FormulaTuple::pair(self.value_tuple(a), self.value_tuple(b)),
        }
    }
}
