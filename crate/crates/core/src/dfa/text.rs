//! Text forms of a [`LevelDfa`]: the line-per-transition dump used for golden
//! files, and Graphviz.

use std::fmt::Write;

use super::{LevelDfa, Transitions};
use crate::error::{Error, Result};
use crate::obdd::VarOrder;

/// One line `level src bit dst` per transition, in level / state / bit order.
pub fn to_dump(dfa: &LevelDfa) -> String {
    let mut out = String::new();
    for (i, level) in dfa.levels().iter().enumerate() {
        for (s, t) in level.iter().enumerate() {
            for (b, d) in t.iter().enumerate() {
                if let Some(d) = d {
                    writeln!(out, "{i} {s} {b} {d}").unwrap();
                }
            }
        }
    }
    out
}

/// Reads a dump back under the natural order over `n` variables. States are
/// taken exactly as listed (no trimming or minimization).
pub fn from_dump(n: usize, text: &str) -> Result<LevelDfa> {
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: idx + 1, msg: "expected four integers".into() })?;
        let &[level, src, bit, dst] = fields.as_slice() else {
            return Err(Error::Parse { line: idx + 1, msg: "expected `level src bit dst`".into() });
        };
        if level >= n || bit > 1 {
            return Err(Error::Parse { line: idx + 1, msg: "level or bit out of range".into() });
        }
        edges.push((level, src, bit, dst));
    }
    let mut levels: Vec<Vec<Transitions>> = vec![Vec::new(); n + 1];
    let grow = |levels: &mut Vec<Vec<Transitions>>, l: usize, s: usize| {
        if levels[l].len() <= s {
            levels[l].resize(s + 1, [None, None]);
        }
    };
    for &(level, src, bit, dst) in &edges {
        grow(&mut levels, level, src);
        grow(&mut levels, level + 1, dst);
        let slot = &mut levels[level][src][bit];
        if slot.is_some() {
            return Err(Error::InvalidParams(format!("two transitions for state {src} bit {bit} at level {level}")));
        }
        *slot = Some(dst as u32);
    }
    LevelDfa::from_levels_raw(VarOrder::natural(n), levels)
}

/// Graphviz with one rank per level; dashed edges read 0, solid edges read 1.
pub fn to_dot(dfa: &LevelDfa) -> String {
    let mut out = String::from("digraph dfa {\n  rankdir=TB;\n");
    for (i, level) in dfa.levels().iter().enumerate() {
        out.push_str("  { rank=same;");
        for s in 0..level.len() {
            write!(out, " q{i}_{s};").unwrap();
        }
        out.push_str(" }\n");
    }
    for (i, level) in dfa.levels().iter().enumerate() {
        for (s, t) in level.iter().enumerate() {
            for (b, d) in t.iter().enumerate() {
                if let Some(d) = d {
                    let style = if b == 0 { " [style=dashed]" } else { "" };
                    writeln!(out, "  q{i}_{s} -> q{}_{d}{style};", i + 1).unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
