use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or scenario file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An input violates a documented invariant (range, uniqueness, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A protocol setup references a component id missing from the catalog.
    #[error("unknown component `{0}`")]
    UnknownComponent(String),

    /// A scalar argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A formula left its valid numerical region (negative discriminant,
    /// complex value where a real one is required, ...).
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    /// A target bit count cannot be reached because the secret rate is zero.
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    /// Plot or table emission was requested for an empty data set.
    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
