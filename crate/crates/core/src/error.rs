use thiserror::Error;

/// Errors produced by the embedding toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("code length {bits} is not divisible into {blocks} blocks")]
    BlocksDoNotDivide { bits: usize, blocks: usize },

    #[error("invalid embedder configuration: {0}")]
    InvalidConfig(String),

    #[error("row {row} is not a unit vector (norm {norm})")]
    NotUnitVector { row: usize, norm: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("unknown seed label `{0}`")]
    UnknownSeedLabel(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("requested {rows} output rows from a dimension-{dim} Toeplitz operator")]
    RowsExceedDim { rows: usize, dim: usize },

    #[error("code mismatch: {0}")]
    CodeMismatch(String),

    #[error("{codes} codes do not align with {points} dataset rows")]
    Alignment { codes: usize, points: usize },

    #[error("target distortion {target} is not bracketed by the sweep for N={n_points} ({reason})")]
    NotBracketed {
        n_points: usize,
        target: f64,
        reason: &'static str,
    },

    #[error("k={k} out of range for a base of {base} points")]
    KOutOfRange { k: usize, base: usize },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
