use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Compilation, FlipEntry};
use crate::dd::{BddRef, BddView, FormulaTuple, Store};
use crate::lang::Rational;

const MAX_CUBES: usize = 64;

/// Decimal when the rational has a finite expansion, `n/d` otherwise.
pub fn format_theta(q: &Rational) -> String {
    let mut d = q.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut digits = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    digits += twos.max(fives);
    if digits == 0 {
        return q.numer().to_string();
    }
    let scaled = q * Rational::from_integer(BigInt::from(10).pow(digits as u32));
    let n = scaled.to_integer().to_string();
    let n = format!("{n:0>width$}", width = digits + 1);
    let (int, frac) = n.split_at(n.len() - digits);
    format!("{int}.{}", frac.trim_end_matches('0'))
}

pub fn format_trace(trace: &[FlipEntry]) -> String {
    trace.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Disjunction of the paths to `T`, over variables `f1`, `f2`, ...
pub fn format_formula(store: &Store, f: BddRef) -> String {
    match store.view(f) {
        Ok(BddView::Const(b)) => return if b { "T".into() } else { "F".into() },
        Err(e) => return format!("<{e}>"),
        Ok(BddView::Node { .. }) => {}
    }
    let mut cubes = Vec::new();
    let mut path = Vec::new();
    if !collect_cubes(store, f, &mut path, &mut cubes) {
        return format!("<bdd with {} nodes>", store.bdd_size(f).unwrap_or(0));
    }
    cubes.join(" ∨ ")
}

fn collect_cubes(store: &Store, f: BddRef, path: &mut Vec<String>, out: &mut Vec<String>) -> bool {
    match store.view(f).expect("own ref") {
        BddView::Const(false) => true,
        BddView::Const(true) => {
            if out.len() >= MAX_CUBES {
                return false;
            }
            out.push(if path.is_empty() { "T".into() } else { path.join("∧") });
            true
        }
        BddView::Node { level, hi, lo } => {
            path.push(format!("f{}", level + 1));
            let ok = collect_cubes(store, hi, path, out);
            path.pop();
            if !ok {
                return false;
            }
            path.push(format!("¬f{}", level + 1));
            let ok = collect_cubes(store, lo, path, out);
            path.pop();
            ok
        }
    }
}

fn format_tuple(store: &Store, t: &FormulaTuple) -> String {
    match t {
        FormulaTuple::Leaf(f) => format_formula(store, *f),
        FormulaTuple::Pair(a, b) => format!("({}, {})", format_tuple(store, a), format_tuple(store, b)),
    }
}

impl Compilation {
    /// Text dump of the compiled triple.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model:  {}", format_tuple(&self.store, &self.triple.model));
        let _ = writeln!(out, "accept: {}", format_formula(&self.store, self.triple.accept));
        let _ = writeln!(out, "trace:  {}", format_trace(&self.triple.trace));
        out
    }
}
