//! Leveled deterministic automata over solution strings.
//!
//! A [`LevelDfa`] over `n` variables has `n + 1` levels of states. Level `i`
//! reads the value of the variable at position `i` of the variable order, and
//! every transition goes from level `i` to level `i + 1`. Level 0 holds the
//! initial state and level `n` the single accepting state, so the accepted
//! words are exactly total assignments. The empty language is represented by
//! an automaton with no states at all.
//!
//! Every public constructor returns a trimmed, minimized automaton with a
//! canonical state numbering (breadth-first from the initial state, bit 0
//! before bit 1), which makes structural equality coincide with isomorphism.

mod text;

use rustc_hash::FxHashMap;

use crate::budget::Budget;
use crate::cnf::{Clause, CnfFormula};
use crate::error::{Error, Result};
use crate::obdd::{NodeRef, ObddManager, VarOrder};

pub use text::{from_dump, to_dot, to_dump};

/// Successors of one state: index into the next level, per bit.
pub type Transitions = [Option<u32>; 2];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDfa {
    order: VarOrder,
    /// `levels[i][s]` are the transitions of state `s` at level `i`; the
    /// accepting level `n` has one state with no transitions (or none at all).
    levels: Vec<Vec<Transitions>>,
}

/// An accepting path, stored as the bit read at each level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DfaPath {
    pub bits: Vec<bool>,
}

impl DfaPath {
    pub fn new(bits: Vec<bool>) -> Self {
        DfaPath { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl LevelDfa {
    /// Builds an automaton from raw per-level transition tables, then trims
    /// and minimizes it. `levels` must have `order.len() + 1` entries.
    pub fn from_levels(order: VarOrder, levels: Vec<Vec<Transitions>>) -> Result<Self> {
        let raw = LevelDfa { order, levels };
        raw.check_structure()?;
        Ok(raw.minimize())
    }

    /// Like [`LevelDfa::from_levels`] but keeps the states exactly as given
    /// (only structural validity is checked). Used to build unminimized witnesses.
    pub fn from_levels_raw(order: VarOrder, levels: Vec<Vec<Transitions>>) -> Result<Self> {
        let raw = LevelDfa { order, levels };
        raw.check_structure()?;
        Ok(raw)
    }

    fn check_structure(&self) -> Result<()> {
        let n = self.order.len();
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.levels.len() != n + 1 {
            return bad(format!("expected {} levels, got {}", n + 1, self.levels.len()));
        }
        if self.levels[n].len() > 1 {
            return bad("more than one accepting state".into());
        }
        if self.levels[n].iter().any(|t| t.iter().any(Option::is_some)) {
            return bad("accepting state has outgoing transitions".into());
        }
        for i in 0..n {
            let width = self.levels[i + 1].len() as u32;
            for (s, t) in self.levels[i].iter().enumerate() {
                if t.iter().flatten().any(|&d| d >= width) {
                    return bad(format!("state {s} at level {i} points past level {}", i + 1));
                }
            }
        }
        Ok(())
    }

    fn empty(order: VarOrder) -> Self {
        let n = order.len();
        LevelDfa { order, levels: vec![Vec::new(); n + 1] }
    }

    /// One state per level with both bits leading on: accepts all `2^n` strings.
    pub fn full(n: usize) -> Self {
        Self::full_with_order(VarOrder::natural(n))
    }

    pub fn full_with_order(order: VarOrder) -> Self {
        let n = order.len();
        let mut levels = vec![vec![[Some(0), Some(0)]]; n];
        levels.push(vec![[None, None]]);
        LevelDfa { order, levels }
    }

    pub fn num_vars(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    pub fn is_empty_language(&self) -> bool {
        self.levels[0].is_empty()
    }

    pub fn level_width(&self, level: usize) -> usize {
        self.levels[level].len()
    }

    pub fn level_widths(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn transitions(&self, level: usize, state: u32) -> Transitions {
        self.levels[level][state as usize]
    }

    /// Successor of `state` at `level` on `bit`.
    pub fn delta(&self, level: usize, state: u32, bit: bool) -> Option<u32> {
        self.levels[level][state as usize][bit as usize]
    }

    /// All states, initial and accepting included. Zero for the empty language.
    pub fn state_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn transition_count(&self) -> usize {
        self.levels
            .iter()
            .flatten()
            .map(|t| t.iter().flatten().count())
            .sum()
    }

    /// Number of accepting paths, by forward dynamic programming.
    pub fn accepting_path_count(&self) -> u128 {
        if self.is_empty_language() {
            return 0;
        }
        let n = self.num_vars();
        let mut cur = vec![1u128];
        for i in 0..n {
            let mut next = vec![0u128; self.levels[i + 1].len()];
            for (s, t) in self.levels[i].iter().enumerate() {
                for d in t.iter().flatten() {
                    next[*d as usize] += cur[s];
                }
            }
            cur = next;
        }
        cur.first().copied().unwrap_or(0)
    }

    /// Runs the automaton on a total assignment (`assignment[v-1]` is the value of `v`).
    pub fn accepts(&self, assignment: &[bool]) -> bool {
        let bits: Vec<bool> = (0..self.num_vars())
            .map(|i| assignment[self.order.var_at(i).pos()])
            .collect();
        self.walk(&bits).is_some()
    }

    /// The state sequence (one per level) of the path spelled by `bits`, or
    /// `None` if the word is rejected.
    pub fn walk(&self, bits: &[bool]) -> Option<Vec<u32>> {
        if self.is_empty_language() || bits.len() != self.num_vars() {
            return None;
        }
        let mut states = Vec::with_capacity(bits.len() + 1);
        let mut s = 0u32;
        states.push(s);
        for (i, &b) in bits.iter().enumerate() {
            s = self.delta(i, s, b)?;
            states.push(s);
        }
        Some(states)
    }

    /// The assignment encoded by a path (indexed by variable, not level).
    pub fn path_assignment(&self, path: &DfaPath) -> Vec<bool> {
        let mut a = vec![false; self.num_vars()];
        for (i, &b) in path.bits.iter().enumerate() {
            a[self.order.var_at(i).pos()] = b;
        }
        a
    }

    /// Every accepting path in lexicographic order (bit 0 first). Exponential;
    /// meant for small automata.
    pub fn accepting_paths(&self) -> Vec<DfaPath> {
        let mut out = Vec::new();
        if self.is_empty_language() {
            return out;
        }
        let mut bits = Vec::with_capacity(self.num_vars());
        self.collect_paths(0, 0, &mut bits, &mut out);
        out
    }

    fn collect_paths(&self, level: usize, s: u32, bits: &mut Vec<bool>, out: &mut Vec<DfaPath>) {
        if level == self.num_vars() {
            out.push(DfaPath::new(bits.clone()));
            return;
        }
        for b in [false, true] {
            if let Some(d) = self.delta(level, s, b) {
                bits.push(b);
                self.collect_paths(level + 1, d, bits, out);
                bits.pop();
            }
        }
    }

    /// Merges equivalent states level by level (from the accepting level up),
    /// drops unreachable and dead states, and renumbers canonically.
    pub fn minimize(&self) -> LevelDfa {
        let n = self.num_vars();
        // class[i][s]: equivalence class of state s at level i, None if dead
        let mut class: Vec<Vec<Option<u32>>> = vec![Vec::new(); n + 1];
        class[n] = (0..self.levels[n].len() as u32).map(Some).collect();
        for i in (0..n).rev() {
            let mut sigs: FxHashMap<Transitions, u32> = FxHashMap::default();
            let below = &class[i + 1];
            class[i] = self.levels[i]
                .iter()
                .map(|t| {
                    let sig = [
                        t[0].and_then(|d| below[d as usize]),
                        t[1].and_then(|d| below[d as usize]),
                    ];
                    if sig == [None, None] {
                        return None;
                    }
                    let next = sigs.len() as u32;
                    Some(*sigs.entry(sig).or_insert(next))
                })
                .collect();
        }
        let Some(init) = class[0].first().copied().flatten() else {
            return LevelDfa::empty(self.order.clone());
        };

        // Representative transitions per class, expressed in class ids.
        let mut rep: Vec<FxHashMap<u32, Transitions>> = vec![FxHashMap::default(); n + 1];
        for i in 0..n {
            for (s, t) in self.levels[i].iter().enumerate() {
                if let Some(c) = class[i][s] {
                    rep[i].entry(c).or_insert_with(|| {
                        [
                            t[0].and_then(|d| class[i + 1][d as usize]),
                            t[1].and_then(|d| class[i + 1][d as usize]),
                        ]
                    });
                }
            }
        }

        // Breadth-first renumbering, level by level.
        let mut levels: Vec<Vec<Transitions>> = Vec::with_capacity(n + 1);
        let mut frontier: Vec<u32> = vec![init];
        for r in rep.iter().take(n) {
            let mut ids: FxHashMap<u32, u32> = FxHashMap::default();
            let mut next_frontier = Vec::new();
            let mut table = Vec::with_capacity(frontier.len());
            for c in &frontier {
                let t = r[c];
                let mut out = [None, None];
                for b in 0..2 {
                    if let Some(d) = t[b] {
                        let id = *ids.entry(d).or_insert_with(|| {
                            next_frontier.push(d);
                            next_frontier.len() as u32 - 1
                        });
                        out[b] = Some(id);
                    }
                }
                table.push(out);
            }
            levels.push(table);
            frontier = next_frontier;
        }
        debug_assert_eq!(frontier.len(), 1);
        levels.push(vec![[None, None]]);
        LevelDfa { order: self.order.clone(), levels }
    }

    /// Intersection with the models of `clause`: product with the two-state
    /// (unsatisfied / satisfied) clause acceptor, then trim and minimize.
    ///
    /// Panics if the clause mentions a variable outside the order.
    pub fn conjoin_clause(&self, clause: &Clause) -> LevelDfa {
        let n = self.num_vars();
        // literal polarity tested at each level, if any
        let mut at_level: Vec<Option<bool>> = vec![None; n];
        for l in clause.lits() {
            assert!(l.var.pos() < n, "clause variable {} outside the automaton", l.var);
            at_level[self.order.level(l.var)] = Some(l.satisfying_value());
        }
        if self.is_empty_language() || clause.is_empty() {
            return LevelDfa::empty(self.order.clone());
        }

        let mut levels: Vec<Vec<Transitions>> = Vec::with_capacity(n + 1);
        let mut frontier: Vec<(u32, bool)> = vec![(0, false)];
        for (i, want) in at_level.iter().enumerate() {
            let mut ids: FxHashMap<(u32, bool), u32> = FxHashMap::default();
            let mut next_frontier = Vec::new();
            let mut table = Vec::with_capacity(frontier.len());
            for &(q, sat) in &frontier {
                let mut out = [None, None];
                for b in [false, true] {
                    if let Some(d) = self.delta(i, q, b) {
                        let key = (d, sat || *want == Some(b));
                        let id = *ids.entry(key).or_insert_with(|| {
                            next_frontier.push(key);
                            next_frontier.len() as u32 - 1
                        });
                        out[b as usize] = Some(id);
                    }
                }
                table.push(out);
            }
            levels.push(table);
            frontier = next_frontier;
        }
        // Reaching the accepting level unsatisfied is a dead end: redirect
        // those edges to nothing and keep one accepting state.
        let sat_id = frontier.iter().position(|&(_, sat)| sat).map(|p| p as u32);
        for t in levels[n - 1].iter_mut() {
            for d in t.iter_mut() {
                *d = match *d {
                    Some(id) if Some(id) == sat_id => Some(0),
                    _ => None,
                };
            }
        }
        levels.push(vec![[None, None]]);
        LevelDfa { order: self.order.clone(), levels }.minimize()
    }

    /// Quasi-reduction of an OBDD: every skipped level becomes a state with
    /// both bits to the same successor.
    pub fn from_obdd(manager: &ObddManager, f: NodeRef) -> LevelDfa {
        Self::from_obdd_budgeted(manager, f, &mut Budget::unlimited()).expect("unlimited budget")
    }

    pub fn from_obdd_budgeted(manager: &ObddManager, f: NodeRef, budget: &mut Budget) -> Result<LevelDfa> {
        let order = manager.order().clone();
        let n = order.len();
        if f == NodeRef::FALSE {
            return Ok(LevelDfa::empty(order));
        }
        let mut total = 1usize;
        let mut levels: Vec<Vec<Transitions>> = Vec::with_capacity(n + 1);
        let mut frontier = vec![f];
        for i in 0..n {
            let mut ids: FxHashMap<NodeRef, u32> = FxHashMap::default();
            let mut next_frontier = Vec::new();
            let mut table = Vec::with_capacity(frontier.len());
            for &g in &frontier {
                let (c0, c1) = if manager.level(g) == i { (manager.lo(g), manager.hi(g)) } else { (g, g) };
                let mut out = [None, None];
                for (b, c) in [c0, c1].into_iter().enumerate() {
                    if c == NodeRef::FALSE {
                        continue;
                    }
                    let id = match ids.get(&c) {
                        Some(&id) => id,
                        None => {
                            total += 1;
                            budget.charge(total)?;
                            next_frontier.push(c);
                            let id = next_frontier.len() as u32 - 1;
                            ids.insert(c, id);
                            id
                        }
                    };
                    out[b] = Some(id);
                }
                table.push(out);
            }
            levels.push(table);
            frontier = next_frontier;
        }
        debug_assert_eq!(frontier, vec![NodeRef::TRUE]);
        levels.push(vec![[None, None]]);
        Ok(LevelDfa { order, levels }.minimize())
    }

    /// Checks the leveled / deterministic / trimmed invariants, returning a
    /// description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        self.check_structure().map_err(|e| e.to_string())?;
        let n = self.num_vars();
        let empty = self.is_empty_language();
        if empty {
            return if self.state_count() == 0 { Ok(()) } else { Err("empty language with leftover states".into()) };
        }
        if self.levels[0].len() != 1 {
            return Err("level 0 must hold exactly the initial state".into());
        }
        if self.levels[n].len() != 1 {
            return Err("missing accepting state".into());
        }
        // forward reachability
        let mut reach: Vec<Vec<bool>> = self.levels.iter().map(|l| vec![false; l.len()]).collect();
        reach[0][0] = true;
        for i in 0..n {
            for (s, t) in self.levels[i].iter().enumerate() {
                if reach[i][s] {
                    for &d in t.iter().flatten() {
                        reach[i + 1][d as usize] = true;
                    }
                }
            }
        }
        // co-reachability
        let mut alive: Vec<Vec<bool>> = self.levels.iter().map(|l| vec![false; l.len()]).collect();
        alive[n][0] = true;
        for i in (0..n).rev() {
            for (s, t) in self.levels[i].iter().enumerate() {
                alive[i][s] = t.iter().flatten().any(|&d| alive[i + 1][d as usize]);
            }
        }
        for i in 0..=n {
            for s in 0..self.levels[i].len() {
                if !reach[i][s] {
                    return Err(format!("state {s} at level {i} is unreachable"));
                }
                if !alive[i][s] {
                    return Err(format!("state {s} at level {i} cannot reach the accepting state"));
                }
            }
        }
        Ok(())
    }

    /// Raw per-level transition tables.
    pub fn levels(&self) -> &[Vec<Transitions>] {
        &self.levels
    }
}

/// Compiles a formula through the OBDD route: build the OBDD under `order`,
/// quasi-reduce, minimize.
pub fn compile_cnf_to_dfa(formula: &CnfFormula, order: &VarOrder, budget: Budget) -> Result<LevelDfa> {
    let mut manager = ObddManager::with_budget(order.clone(), budget);
    let f = manager.compile(formula)?;
    let mut budget = budget;
    LevelDfa::from_obdd_budgeted(&manager, f, &mut budget)
}

/// Compiles by starting from the full automaton and conjoining clauses one
/// at a time. Independent of the OBDD module.
pub fn compile_by_conjunction(formula: &CnfFormula, order: &VarOrder) -> LevelDfa {
    formula
        .clauses()
        .iter()
        .fold(LevelDfa::full_with_order(order.clone()), |d, c| d.conjoin_clause(c))
}

pub fn full_dfa(n: usize) -> LevelDfa {
    LevelDfa::full(n)
}

pub fn minimize(dfa: &LevelDfa) -> LevelDfa {
    dfa.minimize()
}

pub fn conjoin_clause(dfa: &LevelDfa, clause: &Clause) -> LevelDfa {
    dfa.conjoin_clause(clause)
}

pub fn accepting_path_count(dfa: &LevelDfa) -> u128 {
    dfa.accepting_path_count()
}

pub fn dfa_state_count(dfa: &LevelDfa) -> usize {
    dfa.state_count()
}

pub fn dfa_from_obdd(manager: &ObddManager, f: NodeRef) -> LevelDfa {
    LevelDfa::from_obdd(manager, f)
}

#[cfg(test)]
mod tests;
