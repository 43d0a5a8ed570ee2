use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin {0}: expected a non-negative half-integer")]
    InvalidSpin(String),

    #[error("magnetic number m={m} is not allowed for spin j={j}")]
    InvalidMagnetic { j: String, m: String },

    #[error("direction ({0}, {1}, {2}) is not a unit vector")]
    InvalidDirection(f64, f64, f64),

    #[error("dimension {dim} exceeds the supported cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("target gate is not unitary (residual {0:e})")]
    InvalidGate(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("infeasible covariant channel parameters: {0}")]
    InfeasibleParams(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
