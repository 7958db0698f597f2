//! Interchangeability of variables and partial assignments, by brute force.

use crate::cnf::{enumerate_models, CnfFormula, PartialAssignment, Var, DEFAULT_ORACLE_CAP};
use crate::error::{Error, Result};

/// At least two variables can be flipped in every solution without leaving
/// the solution set. Vacuously true for an unsatisfiable formula with `n ≥ 2`.
pub fn fully_multi_interchangeable(formula: &CnfFormula) -> Result<bool> {
    let models = enumerate_models(formula, DEFAULT_ORACLE_CAP)?;
    let is_model = |m: u64| models.binary_search(&m).is_ok();
    let flippable = (0..formula.num_vars())
        .filter(|&v| models.iter().all(|&m| is_model(m ^ 1 << v)))
        .count();
    Ok(flippable >= 2)
}

/// `partial` leaves at least two variables free and every extension of it
/// is a solution.
pub fn weak_multi_interchangeable(formula: &CnfFormula, partial: &PartialAssignment) -> Result<bool> {
    let n = formula.num_vars();
    if n > DEFAULT_ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: DEFAULT_ORACLE_CAP });
    }
    if let Some((v, _)) = partial.iter().find(|(v, _)| v.pos() >= n) {
        return Err(Error::InvalidParams(format!("{v} is outside the formula's {n} variables")));
    }
    if partial.len() + 2 > n {
        return Ok(false);
    }
    let free: Vec<usize> = (0..n).filter(|&i| partial.get(Var::new(i as u32 + 1)).is_none()).collect();
    let mut assignment = vec![false; n];
    for (v, b) in partial.iter() {
        assignment[v.pos()] = b;
    }
    for ext in 0..1u64 << free.len() {
        for (j, &i) in free.iter().enumerate() {
            assignment[i] = ext >> j & 1 == 1;
        }
        if !formula.evaluate(&assignment)? {
            return Ok(false);
        }
    }
    Ok(true)
}
