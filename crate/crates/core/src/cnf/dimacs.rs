//! DIMACS CNF reading and writing.
//!
//! Accepted input: `c` comment lines anywhere, one `p cnf <vars> <clauses>`
//! header before the first clause, clauses as whitespace-separated literals
//! terminated by `0` (a clause may span lines), and an optional SATLIB-style
//! `%` trailer that ends the input. The clause count in the header is not
//! enforced.

use std::fmt::Write;

use super::{Clause, CnfFormula, Lit};
use crate::error::{Error, Result};

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut num_vars: Option<usize> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if num_vars.is_some() {
                return Err(parse_error(line_no, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(parse_error(line_no, "malformed header, expected `p cnf <vars> <clauses>`"));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| parse_error(line_no, "malformed header: bad variable count"))?;
            fields[3]
                .parse::<usize>()
                .map_err(|_| parse_error(line_no, "malformed header: bad clause count"))?;
            num_vars = Some(n);
            continue;
        }
        let n = num_vars.ok_or_else(|| parse_error(line_no, "clause before `p cnf` header"))?;
        for tok in line.split_whitespace() {
            let value: i64 = tok
                .parse()
                .map_err(|_| parse_error(line_no, format!("invalid literal `{tok}`")))?;
            if value == 0 {
                let lits = std::mem::take(&mut pending);
                let clause = Clause::new(lits).map_err(|e| parse_error(pending_line, e.to_string()))?;
                clauses.push(clause);
                continue;
            }
            if value.unsigned_abs() as usize > n {
                return Err(parse_error(
                    line_no,
                    format!("literal {value} out of range for {n} variables"),
                ));
            }
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push(Lit::from_dimacs(value));
        }
    }

    let num_vars = num_vars.ok_or_else(|| parse_error(last_line.max(1), "missing `p cnf` header"))?;
    if !pending.is_empty() {
        return Err(parse_error(pending_line, "clause is missing its terminating 0"));
    }
    CnfFormula::new(num_vars, clauses)
}

/// Canonical DIMACS text: header, then one clause per line.
pub fn emit_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses()).unwrap();
    for c in formula.clauses() {
        for l in c.lits() {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}
