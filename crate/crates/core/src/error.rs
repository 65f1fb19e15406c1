use thiserror::Error;

/// Errors raised by the lattice, mapping, and estimation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice distance must be at least 2, got {0}")]
    InvalidDistance(usize),

    #[error("syndrome does not fit a distance-{distance} lattice: {reason}")]
    SyndromeOutOfRange { distance: usize, reason: String },

    #[error("invalid qubit index {0}")]
    InvalidQubit(usize),

    #[error("invalid coupling pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("invalid distribution parameter: {0}")]
    InvalidDistribution(String),

    #[error("spin configuration has {got} entries, expected {expected}")]
    SpinCount { expected: usize, got: usize },

    #[error("dual mapping undefined for this coupling: {0}")]
    DualMappingUndefined(String),

    #[error("string set is inconsistent with the syndrome")]
    InconsistentStrings,

    #[error("enumeration budget exceeded: {what} is {size}, budget {budget}")]
    BudgetExceeded { what: &'static str, size: usize, budget: usize },

    #[error("fidelity undefined: both amplitudes vanish")]
    UndefinedFidelity,

    #[error("sign-problem: complex couplings cannot be sampled, use the exact engines")]
    ComplexCouplings,

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMcConfig(String),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
