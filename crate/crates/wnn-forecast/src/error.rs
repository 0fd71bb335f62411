//! Error types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by series handling, preprocessing, the forecasting
/// engine, the tuner, and the baselines.
#[derive(Error, Debug)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    ParseError {
        row: usize,
        column: String,
        value: String,
    },

    #[error("column {0:?} not found in input")]
    ColumnNotFound(String),

    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value at position {position}")]
    NonFinite { position: usize },

    #[error("labels have length {labels} but series has length {values}")]
    LabelLengthMismatch { labels: usize, values: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("actual value at position {position} is zero; MAPE is undefined")]
    ZeroActualValue { position: usize },

    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },

    #[error("non-positive value at position {position}; Box-Cox requires x > 0")]
    NonPositiveValue { position: usize },

    #[error("series too short: need at least {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("inverse Box-Cox domain error: lambda*y + 1 = {value} <= 0")]
    DomainError { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("neighbor target index out of range")]
    IndexOutOfRange,

    #[error("no feasible (p, k) cell in the search grid")]
    NoFeasibleCell,

    #[error("optimization failure: simplex degenerated without a finite objective")]
    OptimizationFailure,
}
