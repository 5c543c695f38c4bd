use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {actual} values but the grid expects {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),

    #[error("degenerate balance equation: {}", if *.any_theta { "every theta solves it" } else { "no theta solves it" })]
    DegenerateBalance { any_theta: bool },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("CFL number {number:.3} exceeds limit {limit:.3}")]
    CflViolation { number: f64, limit: f64 },

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
