//! Reduced ordered decision diagrams over flip levels.
//!
//! One [`Store`] owns a BDD table and an ADD table. Level `i` is the `i`-th
//! flip of the compiled trace; smaller levels sit closer to the root. There
//! are no complement edges and no reordering.

mod add;
mod bdd;
pub mod dot;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::DdError;
use crate::lang::{Ty, Value};

pub use add::AddView;
pub use bdd::{BddView, Op};

/// Levels at or above this value are reserved for function-parameter
/// placeholders. Shifting never moves them.
pub const PARAM_BASE: u32 = 1 << 30;

const TERMINAL_LEVEL: u32 = u32::MAX;
const FALSE: u32 = 0;
const TRUE: u32 = 1;

static NEXT_STORE: AtomicU32 = AtomicU32::new(1);

/// Stack headroom for the recursive diagram walks.
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BddRef {
    store: u32,
    idx: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AddRef {
    store: u32,
    idx: u32,
}

impl BddRef {
    pub fn index(self) -> u32 {
        self.idx
    }
}

impl AddRef {
    pub fn index(self) -> u32 {
        self.idx
    }
}

/// ADD terminal: an output value or the rejection marker `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AddValue {
    Val(Value),
    Reject,
}

impl fmt::Display for AddValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AddValue::Val(v) => write!(f, "{v}"),
            AddValue::Reject => write!(f, "R"),
        }
    }
}

/// Nested tuple of model formulas with the shape of the expression's type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FormulaTuple {
    Leaf(BddRef),
    Pair(Box<FormulaTuple>, Box<FormulaTuple>),
}

impl FormulaTuple {
    pub fn pair(a: FormulaTuple, b: FormulaTuple) -> FormulaTuple {
        FormulaTuple::Pair(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<BddRef> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<BddRef>) {
        match self {
            FormulaTuple::Leaf(r) => out.push(*r),
            FormulaTuple::Pair(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn ty(&self) -> Ty {
        match self {
            FormulaTuple::Leaf(_) => Ty::Bool,
            FormulaTuple::Pair(a, b) => Ty::pair(a.ty(), b.ty()),
        }
    }

    /// Rebuilds a tuple of this shape from leaves in left-to-right order.
    pub fn rebuild(ty: &Ty, leaves: &mut impl Iterator<Item = BddRef>) -> FormulaTuple {
        match ty {
            Ty::Bool => FormulaTuple::Leaf(leaves.next().expect("enough leaves")),
            Ty::Product(a, b) => {
                let l = FormulaTuple::rebuild(a, leaves);
                let r = FormulaTuple::rebuild(b, leaves);
                FormulaTuple::pair(l, r)
            }
        }
    }

    pub fn as_leaf(&self) -> Option<BddRef> {
        match self {
            FormulaTuple::Leaf(r) => Some(*r),
            FormulaTuple::Pair(..) => None,
        }
    }

    pub fn fst(&self) -> Option<&FormulaTuple> {
        match self {
            FormulaTuple::Pair(a, _) => Some(a),
            FormulaTuple::Leaf(_) => None,
        }
    }

    pub fn snd(&self) -> Option<&FormulaTuple> {
        match self {
            FormulaTuple::Pair(_, b) => Some(b),
            FormulaTuple::Leaf(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    level: u32,
    hi: u32,
    lo: u32,
}

#[derive(Clone, Debug)]
enum AddNode {
    Term(AddValue),
    Inner { level: u32, hi: u32, lo: u32 },
}

/// Owner of all diagram nodes. Node tables only grow.
pub struct Store {
    id: u32,
    levels: u32,
    nodes: Vec<Node>,
    unique: HashMap<(u32, u32, u32), u32>,
    apply_cache: HashMap<(Op, u32, u32), u32>,
    ite_cache: HashMap<(u32, u32, u32), u32>,
    compose_cache: HashMap<(u32, u32, u32), u32>,
    add_nodes: Vec<AddNode>,
    add_unique: HashMap<(u32, u32, u32), u32>,
    add_terms: HashMap<AddValue, u32>,
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Store")
            .field("id", &self.id)
            .field("levels", &self.levels)
            .field("bdd_nodes", &self.nodes.len())
            .field("add_nodes", &self.add_nodes.len())
            .finish()
    }
}

impl Default for Store {
    fn default() -> Self {
        Store::new(0)
    }
}

impl Store {
    pub fn new(levels: u32) -> Store {
        let term = Node { level: TERMINAL_LEVEL, hi: 0, lo: 0 };
        Store {
            id: NEXT_STORE.fetch_add(1, Ordering::Relaxed),
            levels,
            nodes: vec![term, term],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            ite_cache: HashMap::new(),
            compose_cache: HashMap::new(),
            add_nodes: Vec::new(),
            add_unique: HashMap::new(),
            add_terms: HashMap::new(),
        }
    }

    pub fn level_count(&self) -> u32 {
        self.levels
    }

    /// Grows the level count to at least `n`.
    pub fn reserve_levels(&mut self, n: u32) {
        self.levels = self.levels.max(n);
    }

    /// Sets the level count to the final trace length. Function templates
    /// may have used more levels locally.
    pub(crate) fn set_level_count(&mut self, n: u32) {
        self.levels = n;
    }

    /// Number of BDD nodes ever created, terminals included.
    pub fn bdd_table_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn add_table_size(&self) -> usize {
        self.add_nodes.len()
    }

    fn bdd(&self, idx: u32) -> BddRef {
        BddRef { store: self.id, idx }
    }

    fn add(&self, idx: u32) -> AddRef {
        AddRef { store: self.id, idx }
    }

    fn own(&self, r: BddRef) -> Result<u32, DdError> {
        if r.store == self.id {
            Ok(r.idx)
        } else {
            Err(DdError::ForeignRef)
        }
    }

    fn own_add(&self, r: AddRef) -> Result<u32, DdError> {
        if r.store == self.id {
            Ok(r.idx)
        } else {
            Err(DdError::ForeignRef)
        }
    }

    pub fn owns(&self, r: BddRef) -> bool {
        r.store == self.id
    }
}
