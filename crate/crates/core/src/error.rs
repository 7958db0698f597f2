use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("assignment covers {got} variables, formula has {expected}")]
    IncompleteAssignment { expected: usize, got: usize },

    #[error("brute-force oracle refuses n = {n} (cap {cap})")]
    OracleCap { n: usize, cap: usize },

    #[error("size cap of {cap} nodes exceeded")]
    SizeCap { cap: usize },

    #[error("time cap exceeded")]
    TimeCap,

    #[error("invalid d-DNNF: {0}")]
    InvalidDag(String),

    #[error("path is not an accepting path of the automaton")]
    NotAccepting,

    #[error("path is not compatible with the adjoint nogood of the clause")]
    IncompatiblePath,

    #[error("growth fit: {0}")]
    Fit(String),

    #[error("plot: {0}")]
    Plot(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the errors that a sweep records as a blowup instead of aborting.
    pub fn is_blowup(&self) -> bool {
        matches!(self, Error::SizeCap { .. } | Error::TimeCap)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
