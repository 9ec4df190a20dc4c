use thiserror::Error;

/// Errors surfaced by matrix construction, file ingestion, and harness configuration.
///
/// Solver breakdowns are not errors; they are reported as terminal statuses in
/// [`crate::solver::SolveReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) outside {m}x{n} matrix")]
    IndexOutOfRange { row: usize, col: usize, m: usize, n: usize },
    #[error("non-finite value {value} at entry ({row}, {col})")]
    NonFiniteValue { row: usize, col: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
