//! Exhaustive DPLL compiler producing decision-DNNF.
//!
//! At each call the residual clause set is unit-propagated, split into
//! connected components of its primal graph, and every component is compiled
//! by branching on one variable and recursing on both cofactors. Components
//! are cached by their canonical clause set, and nodes are hash-consed so that
//! equal sub-DAGs are shared.

use rustc_hash::FxHashMap;

use super::{DnnfDag, DnnfNode, DnnfRef};
use crate::budget::Budget;
use crate::cnf::{CnfFormula, Lit, Var};
use crate::error::Result;

/// Branching variable selection within a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Lowest variable index occurring in the component.
    #[default]
    LowestIndex,
    /// Most occurrences in the component, ties to the lowest index.
    MaxOccurrence,
}

#[derive(Debug, Clone, Copy)]
pub struct DnnfOptions {
    pub cache: bool,
    pub branching: Branching,
    pub budget: Budget,
}

impl Default for DnnfOptions {
    fn default() -> Self {
        DnnfOptions { cache: true, branching: Branching::default(), budget: Budget::default() }
    }
}

type Clauses = Vec<Vec<i32>>;

const FALSE: DnnfRef = DnnfRef(0);
const TRUE: DnnfRef = DnnfRef(1);

struct Compiler {
    nodes: Vec<DnnfNode>,
    unique: FxHashMap<DnnfNode, DnnfRef>,
    cache: FxHashMap<Clauses, DnnfRef>,
    opts: DnnfOptions,
    num_vars: usize,
    // union-find scratch, indexed by variable
    parent: Vec<u32>,
}

impl Compiler {
    fn new(num_vars: usize, opts: DnnfOptions) -> Self {
        Compiler {
            nodes: vec![DnnfNode::False, DnnfNode::True],
            unique: FxHashMap::default(),
            cache: FxHashMap::default(),
            opts,
            num_vars,
            parent: (0..=num_vars as u32).collect(),
        }
    }

    fn intern(&mut self, node: DnnfNode) -> Result<DnnfRef> {
        if let Some(&r) = self.unique.get(&node) {
            return Ok(r);
        }
        self.opts.budget.charge(self.nodes.len() + 1)?;
        let r = DnnfRef(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.unique.insert(node, r);
        Ok(r)
    }

    fn literal(&mut self, lit: i32) -> Result<DnnfRef> {
        self.intern(DnnfNode::Literal(Lit::from_dimacs(lit as i64)))
    }

    fn and(&mut self, mut children: Vec<DnnfRef>) -> Result<DnnfRef> {
        if children.contains(&FALSE) {
            return Ok(FALSE);
        }
        children.retain(|&c| c != TRUE);
        match children.len() {
            0 => Ok(TRUE),
            1 => Ok(children[0]),
            _ => {
                children.sort_unstable();
                self.intern(DnnfNode::And(children))
            }
        }
    }

    fn formula(&mut self, mut clauses: Clauses) -> Result<DnnfRef> {
        let mut children = Vec::new();
        loop {
            if clauses.iter().any(Vec::is_empty) {
                return Ok(FALSE);
            }
            let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) else {
                break;
            };
            children.push(self.literal(unit)?);
            clauses = condition(&clauses, unit);
        }
        for component in self.components(clauses) {
            let r = self.component(component)?;
            if r == FALSE {
                return Ok(FALSE);
            }
            children.push(r);
        }
        self.and(children)
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    /// Connected components of the primal graph, ordered by smallest variable.
    fn components(&mut self, clauses: Clauses) -> Vec<Clauses> {
        if clauses.len() <= 1 {
            return if clauses.is_empty() { Vec::new() } else { vec![clauses] };
        }
        for c in &clauses {
            for l in c {
                let v = l.unsigned_abs();
                self.parent[v as usize] = v;
            }
        }
        for c in &clauses {
            for l in &c[1..] {
                let a = self.find(c[0].unsigned_abs());
                let b = self.find(l.unsigned_abs());
                if a != b {
                    // smaller variable becomes the root
                    self.parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        let mut groups: FxHashMap<u32, Clauses> = FxHashMap::default();
        for c in clauses {
            let root = self.find(c[0].unsigned_abs());
            groups.entry(root).or_default().push(c);
        }
        let mut out: Vec<(u32, Clauses)> = groups.into_iter().collect();
        out.sort_unstable_by_key(|(root, _)| *root);
        out.into_iter().map(|(_, c)| c).collect()
    }

    fn branch_var(&self, clauses: &Clauses) -> u32 {
        match self.opts.branching {
            Branching::LowestIndex => clauses
                .iter()
                .flat_map(|c| c.iter().map(|l| l.unsigned_abs()))
                .min()
                .expect("non-empty component"),
            Branching::MaxOccurrence => {
                let mut occ = vec![0u32; self.num_vars + 1];
                for c in clauses {
                    for l in c {
                        occ[l.unsigned_abs() as usize] += 1;
                    }
                }
                let best = *occ.iter().max().unwrap();
                occ.iter().position(|&o| o == best).unwrap() as u32
            }
        }
    }

    fn component(&mut self, mut clauses: Clauses) -> Result<DnnfRef> {
        clauses.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        clauses.dedup();
        if self.opts.cache {
            if let Some(&r) = self.cache.get(&clauses) {
                return Ok(r);
            }
        }
        self.opts.budget.tick()?;
        let v = self.branch_var(&clauses) as i32;
        let lo = self.formula(condition(&clauses, -v))?;
        let hi = self.formula(condition(&clauses, v))?;
        let r = if lo == hi {
            lo
        } else {
            self.intern(DnnfNode::Decision { var: Var::new(v as u32), lo, hi })?
        };
        if self.opts.cache {
            self.cache.insert(clauses, r);
        }
        Ok(r)
    }
}

/// Clauses under `lit = true`: satisfied clauses vanish, `¬lit` is removed.
fn condition(clauses: &Clauses, lit: i32) -> Clauses {
    clauses
        .iter()
        .filter(|c| !c.contains(&lit))
        .map(|c| c.iter().copied().filter(|&l| l != -lit).collect())
        .collect()
}

/// Literal order inside a clause: by variable, negative first.
fn sort_clause(c: &mut [i32]) {
    c.sort_unstable_by_key(|&l| (l.unsigned_abs(), l));
}

pub fn compile_with(formula: &CnfFormula, opts: DnnfOptions) -> Result<DnnfDag> {
    let clauses: Clauses = formula
        .clauses()
        .iter()
        .map(|c| {
            let mut lits: Vec<i32> = c.lits().iter().map(|l| l.to_dimacs() as i32).collect();
            sort_clause(&mut lits);
            lits
        })
        .collect();
    let mut compiler = Compiler::new(formula.num_vars(), opts);
    let root = compiler.formula(clauses)?;
    Ok(DnnfDag { nodes: compiler.nodes, root, num_vars: formula.num_vars() })
}

/// Compiles with caching on and lowest-index branching.
pub fn compile_cnf_to_dnnf(formula: &CnfFormula) -> Result<DnnfDag> {
    compile_with(formula, DnnfOptions::default())
}
