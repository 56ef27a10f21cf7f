use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("target {index}: ambiguity order {order} is not below the pulse count {pulses}")]
    EchoOutsideCpi {
        index: usize,
        order: usize,
        pulses: usize,
    },

    #[error("frequency index {index} outside [0, {bins})")]
    IndexOutOfRange { index: usize, bins: usize },

    #[error("duplicate frequency index {0}")]
    DuplicateIndex(usize),

    #[error("spectrum below floor at frequency indices {0:?}")]
    SpectralFloor(Vec<usize>),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested {requested} atoms but only {available} are admissible")]
    TooManyAtoms { requested: usize, available: usize },

    #[error("least-squares system singular at iteration {iteration} (support {support:?})")]
    SingularLeastSquares {
        iteration: usize,
        support: Vec<(usize, usize)>,
    },

    #[error("explicit Kronecker product needs {entries} entries, cap is {cap}")]
    KroneckerCap { entries: usize, cap: usize },

    #[error("spark enumeration limited to {limit} columns, got {columns}")]
    SparkGuard { columns: usize, limit: usize },

    #[error("scene is not on the delay-Doppler grid: {0}")]
    OffGrid(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
