use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExactLaError {
    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("consecutive boundaries do not compose to zero: entry ({row}, {col}) of the product is {value}")]
    NonzeroComposition { row: usize, col: usize, value: String },

    #[error("reduced core of {rows}x{cols} needs about {needed} bytes, over the budget of {budget} bytes")]
    MemoryBudget {
        rows: usize,
        cols: usize,
        needed: usize,
        budget: usize,
    },

    #[error("time budget exhausted after {pivots} pivots ({rows}x{cols} active)")]
    TimeBudget {
        pivots: usize,
        rows: usize,
        cols: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ExactLaError> = std::result::Result<T, E>;
