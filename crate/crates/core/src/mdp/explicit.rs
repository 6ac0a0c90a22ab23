//! Plain-text MDP format:
//!
//! ```text
//! STATES n
//! INITIAL i
//! LABEL s name        (name: A, R, or a compact value such as (T,F))
//! TRANS src action dst prob
//! ```
//!
//! States are numbered breadth-first from the initial state; `TRANS` lines
//! are sorted by (src, action, dst) and absorbing states get an explicit
//! `d` self-loop.

use std::fmt::Write as _;
use std::io::{self, Write};

use super::{Action, Ap, Mdp, State};
use crate::error::{Error, Result};
use crate::lang::Value;

pub fn write_explicit(m: &Mdp) -> String {
    let m = m.renumber_bfs();
    let mut out = String::new();
    let _ = writeln!(out, "STATES {}", m.len());
    let _ = writeln!(out, "INITIAL {}", m.initial);
    for (i, s) in m.states.iter().enumerate() {
        for ap in &s.labels {
            let _ = writeln!(out, "LABEL {i} {ap}");
        }
    }
    for (i, s) in m.states.iter().enumerate() {
        if s.is_absorbing() {
            let _ = writeln!(out, "TRANS {i} d {i} 1");
            continue;
        }
        let mut choices: Vec<_> = s.choices.iter().collect();
        choices.sort_by_key(|(a, _)| *a);
        for (a, row) in choices {
            let mut row = row.clone();
            row.sort_by_key(|&(_, d)| d);
            for (p, d) in row {
                let _ = writeln!(out, "TRANS {i} {a} {d} {p}");
            }
        }
    }
    out
}

pub fn export_explicit(m: &Mdp, sink: &mut impl Write) -> io::Result<()> {
    sink.write_all(write_explicit(m).as_bytes())
}

fn bad<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Format { line, msg: msg.into() })
}

fn field<T: std::str::FromStr>(parts: &[&str], i: usize, line: usize, what: &str) -> Result<T> {
    match parts.get(i).map(|s| s.parse::<T>()) {
        Some(Ok(v)) => Ok(v),
        _ => bad(line, format!("expected {what}")),
    }
}

pub fn load_explicit_mdp(text: &str) -> Result<Mdp> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or(Error::Format { line: 1, msg: "empty file".into() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.first() != Some(&"STATES") || parts.len() != 2 {
        return bad(ln, "expected `STATES n`");
    }
    let n: usize = field(&parts, 1, ln, "state count")?;
    let (ln, init_line) = lines.next().ok_or(Error::Format { line: ln + 1, msg: "missing INITIAL".into() })?;
    let parts: Vec<&str> = init_line.split_whitespace().collect();
    if parts.first() != Some(&"INITIAL") || parts.len() != 2 {
        return bad(ln, "expected `INITIAL i`");
    }
    let initial: usize = field(&parts, 1, ln, "initial state")?;
    if initial >= n {
        return bad(ln, format!("initial state {initial} out of range (0..{n})"));
    }
    let mut states: Vec<State> = vec![State::default(); n];
    let mut first_line = vec![0usize; n];
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.first() {
            Some(&"LABEL") => {
                if parts.len() != 3 {
                    return bad(ln, "expected `LABEL s name`");
                }
                let s: usize = field(&parts, 1, ln, "state")?;
                if s >= n {
                    return bad(ln, format!("state {s} out of range"));
                }
                let ap = match parts[2] {
                    "A" => Ap::A,
                    "R" => Ap::R,
                    other => match Value::parse_compact(other) {
                        Some(v) => Ap::Val(v),
                        None => return bad(ln, format!("unknown label `{other}`")),
                    },
                };
                states[s].labels.insert(ap);
            }
            Some(&"TRANS") => {
                if parts.len() != 5 {
                    return bad(ln, "expected `TRANS src action dst prob`");
                }
                let src: usize = field(&parts, 1, ln, "source state")?;
                let act = Action::parse(parts[2])
                    .ok_or(Error::Format { line: ln, msg: format!("unknown action `{}`", parts[2]) })?;
                let dst: usize = field(&parts, 3, ln, "destination state")?;
                let p: f64 = field(&parts, 4, ln, "probability")?;
                if src >= n || dst >= n {
                    return bad(ln, "state out of range");
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad(ln, format!("probability {p} out of range"));
                }
                if first_line[src] == 0 {
                    first_line[src] = ln;
                }
                let choices = &mut states[src].choices;
                match choices.iter_mut().find(|(a, _)| *a == act) {
                    Some((_, row)) => row.push((p, dst)),
                    None => choices.push((act, vec![(p, dst)])),
                }
            }
            _ => return bad(ln, format!("unrecognized line `{line}`")),
        }
    }
    for (i, s) in states.iter_mut().enumerate() {
        s.choices.sort_by_key(|(a, _)| *a);
        for (a, row) in &s.choices {
            let sum: f64 = row.iter().map(|(p, _)| p).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return bad(first_line[i], format!("state {i} action {a} sums to {sum}"));
            }
        }
        if matches!(s.choices.as_slice(), [(Action::D, row)] if row.len() == 1 && row[0].1 == i) {
            s.choices.clear();
        }
    }
    Ok(Mdp { states, initial })
}
