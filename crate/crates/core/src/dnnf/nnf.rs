//! The textual NNF format read by common d-DNNF tools.
//!
//! ```text
//! nnf <nodes> <edges> <vars>
//! L <lit>                    literal
//! A <c> <i1> … <ic>          conjunction (A 0 is true)
//! O <v> <c> <i1> … <ic>      disjunction deciding on v, 0 if none (O 0 0 is false)
//! ```
//!
//! Node lines are numbered from 0 in file order and only refer to earlier
//! lines; the last line is the root. A decision node `(¬v ∧ lo) ∨ (v ∧ hi)`
//! is written as `O v 2` over the two conjunctions `A 2 (-v) lo` and
//! `A 2 (v) hi`, and is recognised again on import.

use std::fmt::Write;

use rustc_hash::FxHashMap;

use super::{DnnfDag, DnnfNode, DnnfRef};
use crate::cnf::{Lit, Var};
use crate::error::{Error, Result};

struct Writer {
    lines: Vec<String>,
    edges: usize,
    literal_line: FxHashMap<i64, usize>,
}

impl Writer {
    fn push(&mut self, line: String, arity: usize) -> usize {
        self.lines.push(line);
        self.edges += arity;
        self.lines.len() - 1
    }

    fn literal(&mut self, lit: i64) -> usize {
        if let Some(&i) = self.literal_line.get(&lit) {
            return i;
        }
        let i = self.push(format!("L {lit}"), 0);
        self.literal_line.insert(lit, i);
        i
    }
}

fn join(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn to_nnf(dag: &DnnfDag) -> String {
    let mut w = Writer { lines: Vec::new(), edges: 0, literal_line: FxHashMap::default() };
    let mut line_of: FxHashMap<DnnfRef, usize> = FxHashMap::default();
    for r in dag.reachable() {
        let line = match dag.node(r) {
            DnnfNode::True => w.push("A 0".into(), 0),
            DnnfNode::False => w.push("O 0 0".into(), 0),
            DnnfNode::Literal(l) => w.literal(l.to_dimacs()),
            DnnfNode::And(c) => {
                let ids: Vec<usize> = c.iter().map(|c| line_of[c]).collect();
                w.push(format!("A {} {}", ids.len(), join(&ids)), ids.len())
            }
            DnnfNode::Or(c) => {
                let ids: Vec<usize> = c.iter().map(|c| line_of[c]).collect();
                w.push(format!("O 0 {} {}", ids.len(), join(&ids)), ids.len())
            }
            DnnfNode::Decision { var, lo, hi } => {
                let v = var.index() as i64;
                let (neg, pos) = (w.literal(-v), w.literal(v));
                let a = w.push(format!("A 2 {neg} {}", line_of[lo]), 2);
                let b = w.push(format!("A 2 {pos} {}", line_of[hi]), 2);
                w.push(format!("O {v} 2 {a} {b}"), 2)
            }
        };
        line_of.insert(r, line);
    }
    // Children precede parents, so the root is always the last line written.
    debug_assert_eq!(line_of[&dag.root()], w.lines.len() - 1);
    let mut out = String::new();
    writeln!(out, "nnf {} {} {}", w.lines.len(), w.edges, dag.num_vars()).unwrap();
    for l in &w.lines {
        out.push_str(l);
        out.push('\n');
    }
    out
}

pub fn parse_nnf(text: &str) -> Result<DnnfDag> {
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.into() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing nnf header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "nnf" {
        return Err(err(hline, "malformed header, expected `nnf <nodes> <edges> <vars>`"));
    }
    let num_vars: usize = h[3].parse().map_err(|_| err(hline, "bad variable count"))?;

    let mut b = DnnfDag::builder(num_vars);
    // file line index -> dag ref
    let mut refs: Vec<DnnfRef> = Vec::new();
    for (line_no, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let nums = |from: usize| -> Result<Vec<i64>> {
            f[from..]
                .iter()
                .map(|t| t.parse::<i64>().map_err(|_| err(line_no, "expected integers")))
                .collect()
        };
        let child = |id: i64| -> Result<DnnfRef> {
            refs.get(id as usize).copied().ok_or_else(|| err(line_no, "reference to a later or missing node"))
        };
        let node = match f.first().copied() {
            Some("L") => {
                let v = nums(1)?;
                if v.len() != 1 || v[0] == 0 || v[0].unsigned_abs() as usize > num_vars {
                    return Err(err(line_no, "bad literal"));
                }
                DnnfNode::Literal(Lit::from_dimacs(v[0]))
            }
            Some("A") => {
                let v = nums(1)?;
                if v.is_empty() || v[0] as usize != v.len() - 1 {
                    return Err(err(line_no, "child count mismatch"));
                }
                if v[0] == 0 {
                    DnnfNode::True
                } else {
                    DnnfNode::And(v[1..].iter().map(|&i| child(i)).collect::<Result<_>>()?)
                }
            }
            Some("O") => {
                let v = nums(1)?;
                if v.len() < 2 || v[1] as usize != v.len() - 2 {
                    return Err(err(line_no, "child count mismatch"));
                }
                let kids: Vec<DnnfRef> = v[2..].iter().map(|&i| child(i)).collect::<Result<_>>()?;
                if kids.is_empty() {
                    DnnfNode::False
                } else {
                    match (v[0], kids.as_slice()) {
                        (var, &[a, c]) if var > 0 => decision_from(&b, var, a, c).unwrap_or(DnnfNode::Or(kids)),
                        _ => DnnfNode::Or(kids),
                    }
                }
            }
            _ => return Err(err(line_no, "unknown node kind")),
        };
        refs.push(b.add(node)?);
    }
    let root = *refs.last().ok_or_else(|| err(hline, "no nodes"))?;
    b.finish(root)
}

/// Recognises `O v 2 (A 2 -v lo) (A 2 v hi)` (either child order).
fn decision_from(b: &super::DagBuilder, var: i64, a: DnnfRef, c: DnnfRef) -> Option<DnnfNode> {
    let guarded = |r: DnnfRef| -> Option<(i64, DnnfRef)> {
        let DnnfNode::And(kids) = &b.nodes[r.index()] else { return None };
        let [x, y] = kids.as_slice() else { return None };
        for (lit, body) in [(x, y), (y, x)] {
            if let DnnfNode::Literal(l) = &b.nodes[lit.index()] {
                if l.var.index() as i64 == var {
                    return Some((l.to_dimacs(), *body));
                }
            }
        }
        None
    };
    let (la, ba) = guarded(a)?;
    let (lc, bc) = guarded(c)?;
    let (lo, hi) = match (la < 0, lc < 0) {
        (true, false) => (ba, bc),
        (false, true) => (bc, ba),
        _ => return None,
    };
    Some(DnnfNode::Decision { var: Var::new(var as u32), lo, hi })
}
