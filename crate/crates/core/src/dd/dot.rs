//! Graphviz output. Inner nodes are circles named `f1`, `f2`, ... (level + 1),
//! terminals are boxes; then-edges are solid and else-edges dashed.

use std::collections::HashSet;
use std::fmt::Write;

use super::{AddRef, AddView, BddRef, BddView, Store};
use crate::error::DdError;

pub fn bdd_to_dot(store: &Store, root: BddRef) -> Result<String, DdError> {
    let mut out = String::from("digraph bdd {\n");
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    while let Some(r) = stack.pop() {
        if !seen.insert(r) {
            continue;
        }
        let id = r.index();
        match store.view(r)? {
            BddView::Const(b) => {
                let _ = writeln!(out, "  n{id} [shape=box,label=\"{}\"];", if b { "T" } else { "F" });
            }
            BddView::Node { level, hi, lo } => {
                let _ = writeln!(out, "  n{id} [shape=circle,label=\"{}\"];", var_name(level));
                let _ = writeln!(out, "  n{id} -> n{};", hi.index());
                let _ = writeln!(out, "  n{id} -> n{} [style=dashed];", lo.index());
                stack.push(hi);
                stack.push(lo);
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn add_to_dot(store: &Store, root: AddRef) -> Result<String, DdError> {
    let mut out = String::from("digraph add {\n");
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    while let Some(r) = stack.pop() {
        if !seen.insert(r) {
            continue;
        }
        let id = r.index();
        match store.add_view(r)? {
            AddView::Terminal(v) => {
                let _ = writeln!(out, "  n{id} [shape=box,label=\"{v}\"];");
            }
            AddView::Node { level, hi, lo } => {
                let _ = writeln!(out, "  n{id} [shape=circle,label=\"{}\"];", var_name(level));
                let _ = writeln!(out, "  n{id} -> n{};", hi.index());
                let _ = writeln!(out, "  n{id} -> n{} [style=dashed];", lo.index());
                stack.push(hi);
                stack.push(lo);
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn var_name(level: u32) -> String {
    if level >= super::PARAM_BASE {
        format!("x{}", level - super::PARAM_BASE)
    } else {
        format!("f{}", level + 1)
    }
}
