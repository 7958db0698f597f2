//! Reduced ordered BDDs over a fixed variable order.
//!
//! All nodes live in one arena owned by an [`ObddManager`]. A unique table
//! keyed by `(level, lo, hi)` guarantees that structurally equal nodes are the
//! same [`NodeRef`], so for a fixed order two functions are equal iff their
//! refs are equal. There are no complement edges and no garbage collection;
//! a manager is meant to live for one instance.

mod dot;

use std::collections::hash_map::Entry;

use rustc_hash::FxHashMap;

use crate::budget::Budget;
use crate::cnf::{Clause, CnfFormula, Lit, Var};
use crate::error::{Error, Result};

pub use dot::to_dot;

/// Handle to a node inside one manager. Meaningless across managers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef(u32);

impl NodeRef {
    pub const FALSE: NodeRef = NodeRef(0);
    pub const TRUE: NodeRef = NodeRef(1);

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijection between variables and levels (level 0 is tested first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarOrder {
    level_of: Vec<u32>,
    var_at: Vec<Var>,
}

impl VarOrder {
    /// x1 < x2 < … < xn.
    pub fn natural(n: usize) -> Self {
        VarOrder {
            level_of: (0..n as u32).collect(),
            var_at: (1..=n as u32).map(Var::new).collect(),
        }
    }

    /// `vars[i]` is the variable tested at level `i`. Must be a permutation of `1..=n`.
    pub fn from_sequence(vars: &[Var]) -> Result<Self> {
        let n = vars.len();
        let mut level_of = vec![u32::MAX; n];
        for (level, v) in vars.iter().enumerate() {
            let i = v.pos();
            if i >= n || level_of[i] != u32::MAX {
                return Err(Error::InvalidParams(format!(
                    "variable order is not a permutation of 1..={n}"
                )));
            }
            level_of[i] = level as u32;
        }
        Ok(VarOrder { level_of, var_at: vars.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.var_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.var_at.is_empty()
    }

    pub fn level(&self, var: Var) -> usize {
        self.level_of[var.pos()] as usize
    }

    pub fn var_at(&self, level: usize) -> Var {
        self.var_at[level]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    level: u32,
    lo: NodeRef,
    hi: NodeRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Not,
}

/// Node and edge counts of a decision DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SizeReport {
    pub nodes: usize,
    pub edges: usize,
}

/// How clause BDDs are combined into the formula BDD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConjunctionOrder {
    /// Left fold in clause order.
    #[default]
    Sequential,
    /// Pairwise tree of conjunctions.
    Balanced,
}

pub struct ObddManager {
    order: VarOrder,
    nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeRef>,
    cache: FxHashMap<(Op, NodeRef, NodeRef), NodeRef>,
    budget: Budget,
}

impl ObddManager {
    pub fn new(order: VarOrder) -> Self {
        Self::with_budget(order, Budget::default())
    }

    pub fn with_budget(order: VarOrder, budget: Budget) -> Self {
        let n = order.len() as u32;
        let terminal = |v| Node { level: n, lo: NodeRef(v), hi: NodeRef(v) };
        ObddManager {
            order,
            nodes: vec![terminal(0), terminal(1)],
            unique: FxHashMap::default(),
            cache: FxHashMap::default(),
            budget,
        }
    }

    pub fn natural(n: usize) -> Self {
        Self::new(VarOrder::natural(n))
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    pub fn num_vars(&self) -> usize {
        self.order.len()
    }

    /// Total nodes allocated, terminals included.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    /// Drops every non-terminal node and the operation cache. Outstanding refs
    /// other than the terminals become invalid.
    pub fn reset(&mut self) {
        self.nodes.truncate(2);
        self.unique.clear();
        self.cache.clear();
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    /// Level of a node; terminals sit at level `n`.
    pub fn level(&self, f: NodeRef) -> usize {
        self.nodes[f.index()].level as usize
    }

    /// The variable tested by an internal node.
    pub fn var(&self, f: NodeRef) -> Option<Var> {
        (!f.is_terminal()).then(|| self.order.var_at(self.level(f)))
    }

    pub fn lo(&self, f: NodeRef) -> NodeRef {
        self.nodes[f.index()].lo
    }

    pub fn hi(&self, f: NodeRef) -> NodeRef {
        self.nodes[f.index()].hi
    }

    fn mk(&mut self, level: u32, lo: NodeRef, hi: NodeRef) -> Result<NodeRef> {
        if lo == hi {
            return Ok(lo);
        }
        let node = Node { level, lo, hi };
        match self.unique.entry(node) {
            Entry::Occupied(e) => Ok(*e.get()),
            Entry::Vacant(e) => {
                self.budget.charge(self.nodes.len() + 1)?;
                let r = NodeRef(self.nodes.len() as u32);
                self.nodes.push(node);
                e.insert(r);
                Ok(r)
            }
        }
    }

    /// The canonical node testing `var` with the given children.
    pub fn mk_node(&mut self, var: Var, lo: NodeRef, hi: NodeRef) -> Result<NodeRef> {
        if var.pos() >= self.num_vars() {
            return Err(Error::InvalidParams(format!("{var} is not in the variable order")));
        }
        let level = self.order.level(var);
        for child in [lo, hi] {
            if child.index() >= self.nodes.len() || self.level(child) <= level {
                return Err(Error::InvalidParams(format!(
                    "child {child:?} is not strictly below {var} in the order"
                )));
            }
        }
        self.mk(level as u32, lo, hi)
    }

    pub fn literal(&mut self, lit: Lit) -> Result<NodeRef> {
        let (lo, hi) = if lit.negated {
            (NodeRef::TRUE, NodeRef::FALSE)
        } else {
            (NodeRef::FALSE, NodeRef::TRUE)
        };
        self.mk_node(lit.var, lo, hi)
    }

    fn apply(&mut self, op: Op, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        match op {
            Op::And => {
                if f == NodeRef::FALSE || g == NodeRef::FALSE {
                    return Ok(NodeRef::FALSE);
                }
                if f == NodeRef::TRUE || f == g {
                    return Ok(g);
                }
                if g == NodeRef::TRUE {
                    return Ok(f);
                }
            }
            Op::Or => {
                if f == NodeRef::TRUE || g == NodeRef::TRUE {
                    return Ok(NodeRef::TRUE);
                }
                if f == NodeRef::FALSE || f == g {
                    return Ok(g);
                }
                if g == NodeRef::FALSE {
                    return Ok(f);
                }
            }
            Op::Not => {
                if f.is_terminal() {
                    return Ok(NodeRef(1 - f.0));
                }
            }
        }
        // Both binary ops commute.
        let key = if op != Op::Not && g < f { (op, g, f) } else { (op, f, g) };
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        self.budget.tick()?;

        let (fl, gl) = (self.level(f), self.level(g));
        let top = if op == Op::Not { fl } else { fl.min(gl) };
        let (f0, f1) = if fl == top { (self.lo(f), self.hi(f)) } else { (f, f) };
        let (g0, g1) = if op != Op::Not && gl == top { (self.lo(g), self.hi(g)) } else { (g, g) };
        let lo = self.apply(op, f0, g0)?;
        let hi = self.apply(op, f1, g1)?;
        let r = self.mk(top as u32, lo, hi)?;
        self.cache.insert(key, r);
        Ok(r)
    }

    pub fn apply_and(&mut self, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        self.apply(Op::And, f, g)
    }

    pub fn apply_or(&mut self, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        self.apply(Op::Or, f, g)
    }

    pub fn negate(&mut self, f: NodeRef) -> Result<NodeRef> {
        self.apply(Op::Not, f, NodeRef::FALSE)
    }

    pub fn clause(&mut self, clause: &Clause) -> Result<NodeRef> {
        let mut acc = NodeRef::FALSE;
        for &lit in clause.lits() {
            let l = self.literal(lit)?;
            acc = self.apply_or(acc, l)?;
        }
        Ok(acc)
    }

    /// The formula as an OBDD, clause BDDs combined per `order`.
    pub fn compile_with(&mut self, formula: &CnfFormula, order: ConjunctionOrder) -> Result<NodeRef> {
        if formula.num_vars() > self.num_vars() {
            return Err(Error::InvalidParams(format!(
                "formula has {} variables, manager order has {}",
                formula.num_vars(),
                self.num_vars()
            )));
        }
        match order {
            ConjunctionOrder::Sequential => {
                let mut acc = NodeRef::TRUE;
                for c in formula.clauses() {
                    let cl = self.clause(c)?;
                    acc = self.apply_and(acc, cl)?;
                    if acc == NodeRef::FALSE {
                        break;
                    }
                }
                Ok(acc)
            }
            ConjunctionOrder::Balanced => {
                let mut layer = formula
                    .clauses()
                    .iter()
                    .map(|c| self.clause(c))
                    .collect::<Result<Vec<_>>>()?;
                if layer.is_empty() {
                    return Ok(NodeRef::TRUE);
                }
                while layer.len() > 1 {
                    let mut next = Vec::with_capacity(layer.len().div_ceil(2));
                    for pair in layer.chunks(2) {
                        next.push(match pair {
                            [a, b] => self.apply_and(*a, *b)?,
                            [a] => *a,
                            _ => unreachable!(),
                        });
                    }
                    layer = next;
                }
                Ok(layer[0])
            }
        }
    }

    pub fn compile(&mut self, formula: &CnfFormula) -> Result<NodeRef> {
        self.compile_with(formula, ConjunctionOrder::Sequential)
    }

    /// Internal nodes reachable from `f`, in depth-first post-order.
    pub fn reachable(&self, f: NodeRef) -> Vec<NodeRef> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![(f, false)];
        while let Some((g, expanded)) = stack.pop() {
            if g.is_terminal() {
                continue;
            }
            if expanded {
                out.push(g);
                continue;
            }
            if std::mem::replace(&mut seen[g.index()], true) {
                continue;
            }
            stack.push((g, true));
            stack.push((self.hi(g), false));
            stack.push((self.lo(g), false));
        }
        out
    }

    /// Reachable internal nodes plus reachable terminals; two edges per internal node.
    pub fn node_count(&self, f: NodeRef) -> SizeReport {
        let internal = self.reachable(f);
        let terminals = if f.is_terminal() {
            1
        } else {
            let mut has = [false; 2];
            for &g in &internal {
                for c in [self.lo(g), self.hi(g)] {
                    if c.is_terminal() {
                        has[c.index()] = true;
                    }
                }
            }
            has.iter().filter(|&&b| b).count()
        };
        SizeReport { nodes: internal.len() + terminals, edges: 2 * internal.len() }
    }

    /// Models of `f` over `n ≥ num_vars` variables. Panics if `n > 127`.
    pub fn model_count(&self, f: NodeRef, n: usize) -> u128 {
        assert!(n >= self.num_vars(), "n must cover every variable of the order");
        assert!(n < 128, "model counts are u128");
        // count[g] = models of g over the variables at levels level(g)..num_vars
        let mut count: FxHashMap<NodeRef, u128> = FxHashMap::default();
        count.insert(NodeRef::FALSE, 0);
        count.insert(NodeRef::TRUE, 1);
        for g in self.reachable(f) {
            let lvl = self.level(g);
            let weigh = |c: NodeRef| count[&c] << (self.level(c) - lvl - 1);
            let v = weigh(self.lo(g)) + weigh(self.hi(g));
            count.insert(g, v);
        }
        count[&f] << (self.level(f) + n - self.num_vars())
    }

    pub fn evaluate(&self, f: NodeRef, assignment: &[bool]) -> bool {
        let mut g = f;
        while !g.is_terminal() {
            let v = self.order.var_at(self.level(g));
            g = if assignment[v.pos()] { self.hi(g) } else { self.lo(g) };
        }
        g == NodeRef::TRUE
    }
}

/// Free-function form of [`ObddManager::compile`].
pub fn compile_cnf_to_obdd(manager: &mut ObddManager, formula: &CnfFormula) -> Result<NodeRef> {
    manager.compile(formula)
}

pub fn obdd_node_count(manager: &ObddManager, f: NodeRef) -> SizeReport {
    manager.node_count(f)
}

pub fn obdd_model_count(manager: &ObddManager, f: NodeRef, n: usize) -> u128 {
    manager.model_count(f, n)
}
