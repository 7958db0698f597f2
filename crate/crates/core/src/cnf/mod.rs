//! CNF formulas, the random k-SAT model and a brute-force semantic oracle.

mod dimacs;
mod generate;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use dimacs::{emit_dimacs, parse_dimacs};
pub use generate::{clause_count, derive_seed, generate_clause, generate_instance, ratio_grid, GenParams};

/// Largest variable count the enumeration oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 24;

/// A propositional variable, 1-based as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Panics on index 0.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variables are 1-based");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// Zero-based position, handy for bit masks and slices.
    pub fn pos(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: Var,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: u32) -> Self {
        Lit { var: Var::new(var), negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Lit { var: Var::new(var), negated: true }
    }

    /// From a signed DIMACS integer (non-zero).
    pub fn from_dimacs(value: i64) -> Self {
        assert!(value != 0);
        Lit {
            var: Var::new(value.unsigned_abs() as u32),
            negated: value < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var.index() as i64;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Value of the variable that makes this literal true.
    pub fn satisfying_value(self) -> bool {
        !self.negated
    }

    pub fn is_satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit { var: self.var, negated: !self.negated }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

/// A disjunction of literals over pairwise distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Fails if two literals share a variable.
    pub fn new(lits: Vec<Lit>) -> Result<Self> {
        for (i, a) in lits.iter().enumerate() {
            if lits[..i].iter().any(|b| b.var == a.var) {
                return Err(Error::InvalidParams(format!(
                    "variable {} occurs twice in one clause",
                    a.var
                )));
            }
        }
        Ok(Clause { lits })
    }

    /// Convenience constructor from DIMACS integers. Panics on invalid input.
    pub fn from_dimacs(values: &[i64]) -> Self {
        Clause::new(values.iter().map(|&v| Lit::from_dimacs(v)).collect())
            .expect("distinct variables")
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var.index()).max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| l.is_satisfied_by(assignment[l.var.pos()]))
    }

    /// The partial assignment falsifying this clause: positive literals map
    /// their variable to 0, negative literals to 1.
    pub fn adjoint_nogood(&self) -> PartialAssignment {
        let mut pa = PartialAssignment::new();
        for l in &self.lits {
            pa.set(l.var, l.negated);
        }
        pa
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`Clause::adjoint_nogood`].
pub fn adjoint_nogood(clause: &Clause) -> PartialAssignment {
    clause.adjoint_nogood()
}

/// Variable → value pairs, each variable at most once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialAssignment {
    pairs: BTreeMap<Var, bool>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets (or overwrites) the value of `var`.
    pub fn set(&mut self, var: Var, value: bool) {
        self.pairs.insert(var, value);
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.pairs.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.pairs.iter().map(|(&v, &b)| (v, b))
    }

    /// Whether the total assignment agrees with every pair.
    pub fn is_extended_by(&self, assignment: &[bool]) -> bool {
        self.iter().all(|(v, b)| assignment[v.pos()] == b)
    }
}

impl FromIterator<(Var, bool)> for PartialAssignment {
    fn from_iter<I: IntoIterator<Item = (Var, bool)>>(iter: I) -> Self {
        PartialAssignment { pairs: iter.into_iter().collect() }
    }
}

/// A CNF formula over variables `1..=num_vars`. Duplicate clauses are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        for c in &clauses {
            if c.max_var() as usize > num_vars {
                return Err(Error::InvalidParams(format!(
                    "clause ({c}) mentions a variable beyond n = {num_vars}"
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn empty(num_vars: usize) -> Self {
        CnfFormula { num_vars, clauses: Vec::new() }
    }

    /// Builds a formula from DIMACS-style integer clauses. Panics on invalid input.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Self {
        CnfFormula::new(num_vars, clauses.iter().map(|c| Clause::from_dimacs(c)).collect())
            .expect("valid clauses")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Appends a clause; fails if it mentions a variable beyond `num_vars`.
    pub fn push(&mut self, clause: Clause) -> Result<()> {
        if clause.max_var() as usize > self.num_vars {
            return Err(Error::InvalidParams(format!(
                "clause ({clause}) mentions a variable beyond n = {}",
                self.num_vars
            )));
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Same formula with the clauses permuted.
    pub fn with_clause_order(&self, order: &[usize]) -> Self {
        CnfFormula {
            num_vars: self.num_vars,
            clauses: order.iter().map(|&i| self.clauses[i].clone()).collect(),
        }
    }

    /// Truth value under a total assignment (`assignment[i]` is the value of x(i+1)).
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() < self.num_vars {
            return Err(Error::IncompleteAssignment {
                expected: self.num_vars,
                got: assignment.len(),
            });
        }
        Ok(self.clauses.iter().all(|c| c.is_satisfied_by(assignment)))
    }
}

/// Free-function form of [`CnfFormula::evaluate`].
pub fn evaluate(formula: &CnfFormula, assignment: &[bool]) -> Result<bool> {
    formula.evaluate(assignment)
}

/// Clause as (positive mask, negative mask) for bit-parallel evaluation.
fn clause_masks(formula: &CnfFormula) -> Vec<(u64, u64)> {
    formula
        .clauses()
        .iter()
        .map(|c| {
            c.lits().iter().fold((0u64, 0u64), |(p, n), l| {
                let bit = 1u64 << l.var.pos();
                if l.negated {
                    (p, n | bit)
                } else {
                    (p | bit, n)
                }
            })
        })
        .collect()
}

fn check_cap(formula: &CnfFormula, cap: usize) -> Result<()> {
    let n = formula.num_vars();
    if n > cap || n > 63 {
        return Err(Error::OracleCap { n, cap });
    }
    Ok(())
}

/// Every satisfying assignment as a bit mask (bit i = value of x(i+1)),
/// in increasing numeric order.
pub fn enumerate_models(formula: &CnfFormula, cap: usize) -> Result<Vec<u64>> {
    check_cap(formula, cap)?;
    let masks = clause_masks(formula);
    let total = 1u64 << formula.num_vars();
    Ok((0..total)
        .filter(|&a| masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0))
        .collect())
}

/// Number of models by enumerating all `2^n` assignments.
pub fn brute_force_count_capped(formula: &CnfFormula, cap: usize) -> Result<u64> {
    check_cap(formula, cap)?;
    let masks = clause_masks(formula);
    let total = 1u64 << formula.num_vars();
    Ok((0..total)
        .filter(|&a| masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0))
        .count() as u64)
}

/// [`brute_force_count_capped`] with [`DEFAULT_ORACLE_CAP`].
pub fn brute_force_count(formula: &CnfFormula) -> Result<u64> {
    brute_force_count_capped(formula, DEFAULT_ORACLE_CAP)
}

/// Unpacks a model mask into a total assignment of length `n`.
pub fn mask_to_assignment(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}
