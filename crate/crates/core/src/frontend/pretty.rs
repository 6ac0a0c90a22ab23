//! Source printers. Output re-parses to the same tree.

use std::fmt::Write;

use num_traits::One;

use super::ast::{SExpr, SFunction, SKind, SurfaceProgram};
use crate::lang::{CoreExpr, CoreKind, CoreProgram};

pub fn pretty_program(p: &SurfaceProgram) -> String {
    let mut out = String::new();
    for f in &p.functions {
        out.push_str(&pretty_function(f));
        out.push('\n');
    }
    out.push_str(&pretty_expr(&p.main));
    out.push('\n');
    out
}

fn pretty_function(f: &SFunction) -> String {
    let params: Vec<String> = f.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    format!("fun {}({}): {} {{\n  {}\n}}", f.name, params.join(", "), f.ret, pretty_expr(&f.body))
}

fn atomic(e: &SExpr) -> bool {
    matches!(
        e.kind,
        SKind::Bool(_)
            | SKind::Int(_)
            | SKind::Var(_)
            | SKind::Call(..)
            | SKind::Flip(_)
            | SKind::NFlip
            | SKind::Uniform(..)
            | SKind::Choose(..)
            | SKind::Pair(..)
    )
}

fn operand(e: &SExpr) -> String {
    if atomic(e) {
        pretty_expr(e)
    } else {
        format!("({})", pretty_expr(e))
    }
}

pub fn pretty_expr(e: &SExpr) -> String {
    match &e.kind {
        SKind::Bool(b) => b.to_string(),
        SKind::Int(n) => n.to_string(),
        SKind::Var(x) => x.to_string(),
        SKind::Pair(a, b) => format!("({}, {})", pretty_expr(a), pretty_expr(b)),
        SKind::Fst(a) => format!("fst {}", operand(a)),
        SKind::Snd(a) => format!("snd {}", operand(a)),
        SKind::If(c, t, f) => {
            format!("if {} then {} else {}", operand(c), operand(t), pretty_expr(f))
        }
        SKind::Let(x, a, b) => format!("let {x} = {} in\n{}", operand(a), pretty_expr(b)),
        SKind::Call(f, args) => {
            let args: Vec<String> = args.iter().map(pretty_expr).collect();
            format!("{f}({})", args.join(", "))
        }
        SKind::Flip(q) => {
            if q.denom().is_one() {
                format!("flip({})", q.numer())
            } else {
                format!("flip({}/{})", q.numer(), q.denom())
            }
        }
        SKind::NFlip => "nflip()".into(),
        SKind::Observe(a) => format!("observe {}", operand(a)),
        SKind::Not(a) => format!("!{}", operand(a)),
        SKind::Binary(op, a, b) => format!("{} {} {}", operand(a), op.symbol(), operand(b)),
        SKind::Uniform(lo, hi) => format!("uniform({lo}, {hi})"),
        SKind::Choose(lo, hi) => format!("choose({lo}, {hi})"),
    }
}

/// Debug rendering of core programs, one binding per line.
pub fn pretty_core(p: &CoreProgram) -> String {
    let mut out = String::new();
    for f in &p.functions {
        let _ = writeln!(out, "fun {}({}: {}): {} {{", f.name, f.param, f.param_ty, f.ret_ty);
        write_core(&mut out, &f.body, 1);
        let _ = writeln!(out, "}}");
    }
    write_core(&mut out, &p.main, 0);
    out
}

fn write_core(out: &mut String, e: &CoreExpr, depth: usize) {
    let pad = "  ".repeat(depth);
    match &e.kind {
        CoreKind::Let(x, a, b) => {
            if matches!(a.kind, CoreKind::Let(..) | CoreKind::If(..)) {
                let _ = writeln!(out, "{pad}let {x} =");
                write_core(out, a, depth + 1);
                let _ = writeln!(out, "{pad}in");
            } else {
                let _ = writeln!(out, "{pad}let {x} = {} in", core_line(a));
            }
            write_core(out, b, depth);
        }
        CoreKind::If(c, t, f) => {
            let _ = writeln!(out, "{pad}if {c} then");
            write_core(out, t, depth + 1);
            let _ = writeln!(out, "{pad}else");
            write_core(out, f, depth + 1);
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", core_line(e));
        }
    }
}

fn core_line(e: &CoreExpr) -> String {
    match &e.kind {
        CoreKind::Atom(a) => a.to_string(),
        CoreKind::Tuple(a, b) => format!("({a}, {b})"),
        CoreKind::Fst(a) => format!("fst {a}"),
        CoreKind::Snd(a) => format!("snd {a}"),
        CoreKind::Call(f, a) => format!("{f}({a})"),
        CoreKind::Flip(q) => format!("flip({q})"),
        CoreKind::NFlip => "nflip()".into(),
        CoreKind::Observe(a) => format!("observe {a}"),
        CoreKind::If(..) | CoreKind::Let(..) => "<compound>".into(),
    }
}
