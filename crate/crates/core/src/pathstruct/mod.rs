//! Interchangeable paths in leveled DFAs.
//!
//! An edge is *adjoint* to a path when it leaves the same state and enters
//! the same state as a path edge but reads the other bit. In a binary leveled
//! DFA that happens exactly at the levels where the path's state sends both
//! bits to the path's next state. A path compatible with a clause's adjoint
//! nogood is *i-interchangeable* when `i` of its adjoint edges sit on nogood
//! variables; it is *multi-interchangeable* when `i ≥ 2`.

mod interchange;
mod phase;

use crate::cnf::{Clause, Var};
use crate::dfa::{DfaPath, LevelDfa};
use crate::error::{Error, Result};

pub use interchange::{fully_multi_interchangeable, weak_multi_interchangeable};
pub use phase::{
    phase_experiment, read_phase_csv, write_phase_csv, PhaseExperimentConfig, PhaseLabel, PhaseRow,
    PHASE_SCHEMA,
};

/// An edge parallel to a path edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdjointEdge {
    pub level: usize,
    pub var: Var,
    /// Source state at `level` (shared with the path edge).
    pub from: u32,
    /// Target state at `level + 1` (shared with the path edge).
    pub to: u32,
    /// The bit the adjoint edge reads; the path reads the other one.
    pub bit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathClassification {
    pub i: usize,
}

impl PathClassification {
    pub fn is_multi(self) -> bool {
        self.i >= 2
    }
}

/// Adjoint edges of an accepting path, in level order.
pub fn adjoint_edges(dfa: &LevelDfa, path: &DfaPath) -> Result<Vec<AdjointEdge>> {
    let states = dfa.walk(&path.bits).ok_or(Error::NotAccepting)?;
    Ok(path
        .bits
        .iter()
        .enumerate()
        .filter_map(|(level, &b)| {
            let (from, to) = (states[level], states[level + 1]);
            (dfa.delta(level, from, !b) == Some(to)).then(|| AdjointEdge {
                level,
                var: dfa.order().var_at(level),
                from,
                to,
                bit: !b,
            })
        })
        .collect())
}

/// Required bit per level: `Some(v)` at levels of the clause's variables,
/// where `v` is the nogood value. `None` if the clause leaves the variable range.
fn nogood_by_level(dfa: &LevelDfa, clause: &Clause) -> Option<Vec<Option<bool>>> {
    let n = dfa.num_vars();
    let mut need = vec![None; n];
    for l in clause.lits() {
        if l.var.pos() >= n {
            return None;
        }
        need[dfa.order().level(l.var)] = Some(!l.satisfying_value());
    }
    Some(need)
}

/// Whether every pair of the clause's adjoint nogood is read along the path.
pub fn is_compatible(dfa: &LevelDfa, path: &DfaPath, clause: &Clause) -> bool {
    match nogood_by_level(dfa, clause) {
        Some(need) if path.len() == need.len() => need
            .iter()
            .zip(&path.bits)
            .all(|(need, &b)| need.is_none_or(|v| v == b)),
        _ => false,
    }
}

/// Number of adjoint edges of `path` on variables of `clause`.
pub fn classify_path(dfa: &LevelDfa, path: &DfaPath, clause: &Clause) -> Result<PathClassification> {
    let edges = adjoint_edges(dfa, path)?;
    if !is_compatible(dfa, path, clause) {
        return Err(Error::IncompatiblePath);
    }
    let need = nogood_by_level(dfa, clause).expect("checked by is_compatible");
    Ok(PathClassification { i: edges.iter().filter(|e| need[e.level].is_some()).count() })
}

/// Bits allowed at a level: the nogood bit if constrained, else both.
fn allowed(need: Option<bool>) -> &'static [bool] {
    match need {
        Some(false) => &[false],
        Some(true) => &[true],
        None => &[false, true],
    }
}

/// Whether some compatible accepting path is multi-interchangeable.
///
/// Forward pass over the levels keeping, per state, the largest number of
/// qualifying adjoint edges on any compatible prefix reaching it (capped at 2).
pub fn has_multi_interchangeable_path(dfa: &LevelDfa, clause: &Clause) -> bool {
    if dfa.is_empty_language() {
        return false;
    }
    let Some(need) = nogood_by_level(dfa, clause) else { return false };
    let mut best: Vec<i8> = vec![-1; dfa.level_width(0)];
    best[0] = 0;
    for (level, &need) in need.iter().enumerate() {
        let mut next = vec![-1i8; dfa.level_width(level + 1)];
        for (s, &c) in best.iter().enumerate() {
            if c < 0 {
                continue;
            }
            let t = dfa.transitions(level, s as u32);
            let gain = (need.is_some() && t[0].is_some() && t[0] == t[1]) as i8;
            for &b in allowed(need) {
                if let Some(d) = t[b as usize] {
                    let d = d as usize;
                    next[d] = next[d].max((c + gain).min(2));
                }
            }
        }
        best = next;
    }
    best.first().is_some_and(|&c| c >= 2)
}

/// A multi-interchangeable path, if one exists (the lexicographically first
/// one found by the forward pass).
pub fn multi_interchangeable_witness(dfa: &LevelDfa, clause: &Clause) -> Option<DfaPath> {
    if dfa.is_empty_language() {
        return None;
    }
    let need = nogood_by_level(dfa, clause)?;
    let n = dfa.num_vars();
    // back[level][state * 3 + count] = (previous state, bit, previous count)
    let mut back: Vec<Vec<Option<(u32, bool, u8)>>> = Vec::with_capacity(n);
    let mut reach = vec![false; dfa.level_width(0) * 3];
    reach[0] = true;
    for (level, &need) in need.iter().enumerate() {
        let width = dfa.level_width(level + 1);
        let mut next = vec![false; width * 3];
        let mut from = vec![None; width * 3];
        for (idx, _) in reach.iter().enumerate().filter(|(_, r)| **r) {
            let (s, c) = ((idx / 3) as u32, (idx % 3) as u8);
            let t = dfa.transitions(level, s);
            let gain = (need.is_some() && t[0].is_some() && t[0] == t[1]) as u8;
            for &b in allowed(need) {
                if let Some(d) = t[b as usize] {
                    let j = d as usize * 3 + (c + gain).min(2) as usize;
                    if !next[j] {
                        next[j] = true;
                        from[j] = Some((s, b, c));
                    }
                }
            }
        }
        back.push(from);
        reach = next;
    }
    if !reach.get(2).copied().unwrap_or(false) {
        return None;
    }
    let mut bits = vec![false; n];
    let (mut s, mut c) = (0u32, 2u8);
    for level in (0..n).rev() {
        let (ps, b, pc) = back[level][s as usize * 3 + c as usize].expect("reached entries have a parent");
        bits[level] = b;
        s = ps;
        c = pc;
    }
    Some(DfaPath::new(bits))
}

#[cfg(test)]
mod tests;
