use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Schmidt weights must be strictly positive (got {p1}, {p2})")]
    NonPositiveWeight { p1: f64, p2: f64 },

    #[error("weight pair ({i}, {j}) is degenerate: |p_i - p_j| = {gap:e}")]
    DegeneratePair { i: usize, j: usize, gap: f64 },

    #[error("weight pair ({i}, {j}) is out of range for Schmidt rank {rank}")]
    PairOutOfRange { i: usize, j: usize, rank: usize },

    #[error("state must have at least {required} subsystems, found {found}")]
    TooFewSubsystems { required: usize, found: usize },

    #[error("instance too large: {count} strategies exceeds the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
