use thiserror::Error;

/// Errors raised by the algebraic, form, and lattice layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires m = 3, found m = {0}")]
    RequiresDim3(usize),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("singular matrix (|det| = {det:e} below threshold)")]
    Singular { det: f64 },

    #[error("degree overflow: degree {degree} exceeds chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("value space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("jet exhausted: no derivative data left to differentiate")]
    JetExhausted,

    #[error("series did not terminate after {0} terms")]
    SeriesNonTermination(usize),

    #[error("operation requires a periodic chart")]
    NonPeriodicChart,

    #[error("wrong form degree: expected {expected}, found {found}")]
    WrongDegree { expected: usize, found: usize },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("field is not periodic on the chart (mismatch {0:e})")]
    NotPeriodic(f64),

    #[error("grid too small: every axis needs at least {min} samples")]
    GridTooSmall { min: usize },

    #[error("inadmissible section: sup |pi_p(omega)| = {sup:e} exceeds {tol:e}")]
    Inadmissible { sup: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
