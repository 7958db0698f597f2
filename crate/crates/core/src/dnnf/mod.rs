//! Decision-DNNF: NNF DAGs whose conjunctions are decomposable and whose
//! disjunctions are all decisions on a variable.
//!
//! [`compile_cnf_to_dnnf`] builds them with an exhaustive DPLL search (unit
//! propagation, connected-component splitting, component caching). The
//! remaining functions are queries and validators that work on any
//! [`DnnfDag`], including hand-built ones containing raw `Or` nodes.

mod compile;
mod nnf;

use fixedbitset::FixedBitSet;

use crate::cnf::{Lit, Var};
use crate::error::{Error, Result};
use crate::obdd::SizeReport;

pub use compile::{compile_cnf_to_dnnf, compile_with, Branching, DnnfOptions};
pub use nnf::{parse_nnf, to_nnf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DnnfRef(u32);

impl DnnfRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DnnfNode {
    True,
    False,
    Literal(Lit),
    And(Vec<DnnfRef>),
    /// Unrestricted disjunction. Never produced by the compiler; exists so
    /// that imported or hand-built DAGs can be represented and rejected.
    Or(Vec<DnnfRef>),
    /// `(¬var ∧ lo) ∨ (var ∧ hi)`.
    Decision { var: Var, lo: DnnfRef, hi: DnnfRef },
}

impl DnnfNode {
    /// Child refs; a decision lists `lo` then `hi`.
    pub fn child_refs(&self) -> Vec<DnnfRef> {
        match self {
            DnnfNode::And(c) | DnnfNode::Or(c) => c.clone(),
            DnnfNode::Decision { lo, hi, .. } => vec![*lo, *hi],
            _ => Vec::new(),
        }
    }
}

/// An NNF DAG stored in topological order: every node's children have
/// smaller indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnnfDag {
    nodes: Vec<DnnfNode>,
    root: DnnfRef,
    num_vars: usize,
}

impl DnnfDag {
    pub fn builder(num_vars: usize) -> DagBuilder {
        DagBuilder { nodes: Vec::new(), num_vars }
    }

    pub fn root(&self) -> DnnfRef {
        self.root
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn node(&self, r: DnnfRef) -> &DnnfNode {
        &self.nodes[r.index()]
    }

    /// Nodes reachable from the root, in increasing index order (children first).
    pub fn reachable(&self) -> Vec<DnnfRef> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        seen[self.root.index()] = true;
        while let Some(r) = stack.pop() {
            for c in self.node(r).child_refs() {
                if !std::mem::replace(&mut seen[c.index()], true) {
                    stack.push(c);
                }
            }
        }
        (0..self.nodes.len() as u32)
            .filter(|&i| seen[i as usize])
            .map(DnnfRef)
            .collect()
    }

    /// Reachable nodes of every kind; edges are summed child arities
    /// (a decision node has two).
    pub fn node_count(&self) -> SizeReport {
        let reach = self.reachable();
        let edges = reach.iter().map(|&r| self.node(r).child_refs().len()).sum();
        SizeReport { nodes: reach.len(), edges }
    }

    /// Variable support of every reachable node (indexed like `nodes`).
    fn supports(&self, reach: &[DnnfRef]) -> Vec<Option<FixedBitSet>> {
        let mut sup: Vec<Option<FixedBitSet>> = vec![None; self.nodes.len()];
        for &r in reach {
            let mut s = FixedBitSet::with_capacity(self.num_vars);
            match self.node(r) {
                DnnfNode::Literal(l) => s.insert(l.var.pos()),
                DnnfNode::Decision { var, .. } => s.insert(var.pos()),
                _ => {}
            }
            for c in self.node(r).child_refs() {
                s.union_with(sup[c.index()].as_ref().expect("children precede parents"));
            }
            sup[r.index()] = Some(s);
        }
        sup
    }

    /// Exact model count over `n ≥ num_vars` variables in one bottom-up pass.
    /// Rejects raw `Or` nodes, non-decomposable `And` nodes and decisions on
    /// a variable their branches still mention. Panics if `n > 127`.
    pub fn model_count(&self, n: usize) -> Result<u128> {
        assert!(n < 128, "model counts are u128");
        if n < self.num_vars {
            return Err(Error::InvalidParams(format!("n = {n} is below the DAG's {} variables", self.num_vars)));
        }
        let reach = self.reachable();
        let sup = self.supports(&reach);
        let width = |r: DnnfRef| sup[r.index()].as_ref().unwrap().count_ones(..) as u32;
        let mut count = vec![0u128; self.nodes.len()];
        for &r in &reach {
            count[r.index()] = match self.node(r) {
                DnnfNode::True | DnnfNode::Literal(_) => 1,
                DnnfNode::False => 0,
                DnnfNode::And(children) => {
                    let mut seen = FixedBitSet::with_capacity(self.num_vars);
                    let mut product = 1u128;
                    for c in children {
                        let cs = sup[c.index()].as_ref().unwrap();
                        if !seen.is_disjoint(cs) {
                            return Err(Error::InvalidDag(format!("and-node {} is not decomposable", r.index())));
                        }
                        seen.union_with(cs);
                        product *= count[c.index()];
                    }
                    product
                }
                DnnfNode::Or(_) => {
                    return Err(Error::InvalidDag(format!("or-node {} is not a decision", r.index())));
                }
                DnnfNode::Decision { var, lo, hi } => {
                    for c in [lo, hi] {
                        if sup[c.index()].as_ref().unwrap().contains(var.pos()) {
                            return Err(Error::InvalidDag(format!(
                                "decision node {} on {var} has a branch mentioning {var}",
                                r.index()
                            )));
                        }
                    }
                    let w = width(r);
                    (count[lo.index()] << (w - 1 - width(*lo))) + (count[hi.index()] << (w - 1 - width(*hi)))
                }
            };
        }
        Ok(count[self.root.index()] << (n as u32 - width(self.root)))
    }

    /// Every `And` node's children have pairwise disjoint supports.
    pub fn check_decomposability(&self) -> bool {
        let reach = self.reachable();
        let sup = self.supports(&reach);
        reach.iter().all(|&r| match self.node(r) {
            DnnfNode::And(children) => {
                let mut seen = FixedBitSet::with_capacity(self.num_vars);
                children.iter().all(|c| {
                    let cs = sup[c.index()].as_ref().unwrap();
                    let ok = seen.is_disjoint(cs);
                    seen.union_with(cs);
                    ok
                })
            }
            _ => true,
        })
    }

    /// Every disjunction is a decision whose variable is consumed at the node
    /// (its branches do not mention it), so the two disjuncts `¬v ∧ lo` and
    /// `v ∧ hi` are mutually exclusive. Raw `Or` nodes fail.
    pub fn check_determinism(&self) -> bool {
        let reach = self.reachable();
        let sup = self.supports(&reach);
        reach.iter().all(|&r| match self.node(r) {
            DnnfNode::Or(_) => false,
            DnnfNode::Decision { var, lo, hi } => [lo, hi]
                .iter()
                .all(|c| !sup[c.index()].as_ref().unwrap().contains(var.pos())),
            _ => true,
        })
    }

    /// Truth value under a total assignment (`assignment[v-1]` for variable `v`).
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        let reach = self.reachable();
        let mut val = vec![false; self.nodes.len()];
        for &r in &reach {
            val[r.index()] = match self.node(r) {
                DnnfNode::True => true,
                DnnfNode::False => false,
                DnnfNode::Literal(l) => l.is_satisfied_by(assignment[l.var.pos()]),
                DnnfNode::And(c) => c.iter().all(|c| val[c.index()]),
                DnnfNode::Or(c) => c.iter().any(|c| val[c.index()]),
                DnnfNode::Decision { var, lo, hi } => {
                    if assignment[var.pos()] {
                        val[hi.index()]
                    } else {
                        val[lo.index()]
                    }
                }
            };
        }
        val[self.root.index()]
    }
}

/// Appends nodes in topological order; no sharing or simplification.
pub struct DagBuilder {
    nodes: Vec<DnnfNode>,
    num_vars: usize,
}

impl DagBuilder {
    pub fn add(&mut self, node: DnnfNode) -> Result<DnnfRef> {
        let next = self.nodes.len();
        if node.child_refs().iter().any(|c| c.index() >= next) {
            return Err(Error::InvalidDag("child refers to a node not yet added".into()));
        }
        let vars_ok = match &node {
            DnnfNode::Literal(l) => l.var.pos() < self.num_vars,
            DnnfNode::Decision { var, .. } => var.pos() < self.num_vars,
            _ => true,
        };
        if !vars_ok {
            return Err(Error::InvalidDag("variable beyond num_vars".into()));
        }
        self.nodes.push(node);
        Ok(DnnfRef(next as u32))
    }

    pub fn finish(self, root: DnnfRef) -> Result<DnnfDag> {
        if root.index() >= self.nodes.len() {
            return Err(Error::InvalidDag("root refers to a missing node".into()));
        }
        Ok(DnnfDag { nodes: self.nodes, root, num_vars: self.num_vars })
    }
}

pub fn dnnf_node_count(dag: &DnnfDag) -> SizeReport {
    dag.node_count()
}

pub fn dnnf_model_count(dag: &DnnfDag, n: usize) -> Result<u128> {
    dag.model_count(n)
}

pub fn check_decomposability(dag: &DnnfDag) -> bool {
    dag.check_decomposability()
}

pub fn check_determinism(dag: &DnnfDag) -> bool {
    dag.check_determinism()
}
