//! Knowledge-compilation laboratory for random k-SAT.
//!
//! Random instances from [`cnf`] are compiled into three target languages:
//! reduced OBDDs ([`obdd`]), leveled DFAs over solution strings ([`dfa`]) and
//! decision-DNNF ([`dnnf`]). [`pathstruct`] analyses interchangeable paths in
//! the automata and [`harness`] runs ratio sweeps over all of it.

pub mod budget;
pub mod cnf;
pub mod dfa;
pub mod dnnf;
pub mod error;
pub mod harness;
pub mod obdd;
pub mod pathstruct;
mod table;

pub use budget::Budget;
pub use error::{Error, Result};
