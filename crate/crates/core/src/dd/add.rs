use std::collections::{HashMap, HashSet};

use super::{deep, AddNode, AddRef, AddValue, BddRef, FormulaTuple, Store, FALSE, TERMINAL_LEVEL, TRUE};
use crate::error::DdError;
use crate::lang::{Ty, Value};

/// Read-only view of one ADD node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AddView<'a> {
    Terminal(&'a AddValue),
    Node { level: u32, hi: AddRef, lo: AddRef },
}

impl Store {
    fn add_term(&mut self, v: AddValue) -> u32 {
        if let Some(&i) = self.add_terms.get(&v) {
            return i;
        }
        let i = self.add_nodes.len() as u32;
        self.add_nodes.push(AddNode::Term(v.clone()));
        self.add_terms.insert(v, i);
        i
    }

    fn add_mk(&mut self, level: u32, hi: u32, lo: u32) -> u32 {
        if hi == lo {
            return hi;
        }
        if let Some(&i) = self.add_unique.get(&(level, hi, lo)) {
            return i;
        }
        let i = self.add_nodes.len() as u32;
        self.add_nodes.push(AddNode::Inner { level, hi, lo });
        self.add_unique.insert((level, hi, lo), i);
        i
    }

    pub fn add_terminal(&mut self, v: AddValue) -> AddRef {
        let i = self.add_term(v);
        self.add(i)
    }

    pub fn add_view(&self, r: AddRef) -> Result<AddView<'_>, DdError> {
        let i = self.own_add(r)?;
        Ok(match &self.add_nodes[i as usize] {
            AddNode::Term(v) => AddView::Terminal(v),
            AddNode::Inner { level, hi, lo } => AddView::Node { level: *level, hi: self.add(*hi), lo: self.add(*lo) },
        })
    }

    /// The ADD of `(model | accept)`: `R` wherever `accept` is false, and
    /// otherwise the value spelled out by the model leaves.
    pub fn guard(&mut self, model: &FormulaTuple, accept: BddRef) -> Result<AddRef, DdError> {
        let leaves = model.leaves().into_iter().map(|r| self.own(r)).collect::<Result<Vec<u32>, _>>()?;
        let accept = self.own(accept)?;
        let ty = model.ty();
        let mut memo = HashMap::new();
        let r = self.guard_raw(&ty, leaves, accept, &mut memo);
        Ok(self.add(r))
    }

    fn guard_raw(&mut self, ty: &Ty, leaves: Vec<u32>, accept: u32, memo: &mut HashMap<(Vec<u32>, u32), u32>) -> u32 {
        if accept == FALSE {
            return self.add_term(AddValue::Reject);
        }
        let level =
            leaves.iter().chain(std::iter::once(&accept)).map(|&i| self.level_of(i)).min().unwrap_or(TERMINAL_LEVEL);
        if level == TERMINAL_LEVEL {
            debug_assert_eq!(accept, TRUE);
            let bits: Vec<bool> = leaves.iter().map(|&i| i == TRUE).collect();
            return self.add_term(AddValue::Val(Value::from_bits(ty, &bits)));
        }
        let key = (leaves, accept);
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let (leaves, accept) = key;
        let split = |s: &Store, i: u32| {
            let n = s.nodes[i as usize];
            if n.level == level {
                (n.hi, n.lo)
            } else {
                (i, i)
            }
        };
        let (a1, a0) = split(self, accept);
        let (l1, l0): (Vec<u32>, Vec<u32>) = leaves.iter().map(|&i| split(self, i)).unzip();
        let hi = deep(|| self.guard_raw(ty, l1, a1, memo));
        let lo = deep(|| self.guard_raw(ty, l0, a0, memo));
        let r = self.add_mk(level, hi, lo);
        memo.insert((leaves, accept), r);
        r
    }

    pub fn eval_add(&self, root: AddRef, assignment: &[bool]) -> Result<AddValue, DdError> {
        let mut i = self.own_add(root)?;
        if assignment.len() != self.levels as usize {
            return Err(DdError::AssignmentLength { got: assignment.len(), expected: self.levels as usize });
        }
        loop {
            match &self.add_nodes[i as usize] {
                AddNode::Term(v) => return Ok(v.clone()),
                AddNode::Inner { level, hi, lo } => {
                    let bit = *assignment
                        .get(*level as usize)
                        .ok_or(DdError::LevelOutOfRange { level: *level as i64, count: self.levels })?;
                    i = if bit { *hi } else { *lo };
                }
            }
        }
    }

    /// Reachable nodes from `root` as (inner, terminal) counts.
    pub fn add_size(&self, root: AddRef) -> Result<(usize, usize), DdError> {
        let root = self.own_add(root)?;
        let mut seen = HashSet::new();
        let mut stack = vec![root];
        let (mut inner, mut terms) = (0, 0);
        while let Some(i) = stack.pop() {
            if !seen.insert(i) {
                continue;
            }
            match &self.add_nodes[i as usize] {
                AddNode::Term(_) => terms += 1,
                AddNode::Inner { hi, lo, .. } => {
                    inner += 1;
                    stack.push(*hi);
                    stack.push(*lo);
                }
            }
        }
        Ok((inner, terms))
    }

    /// Reduction invariants over the whole ADD table.
    pub fn add_table_reduced(&self) -> bool {
        let level = |i: u32| match &self.add_nodes[i as usize] {
            AddNode::Term(_) => TERMINAL_LEVEL,
            AddNode::Inner { level, .. } => *level,
        };
        let mut triples = HashSet::new();
        let mut terms = HashSet::new();
        self.add_nodes.iter().all(|n| match n {
            AddNode::Term(v) => terms.insert(v.clone()),
            AddNode::Inner { level: l, hi, lo } => {
                hi != lo && triples.insert((*l, *hi, *lo)) && level(*hi) > *l && level(*lo) > *l
            }
        })
    }
}
