use thiserror::Error;

/// Errors raised by the sketching library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix has no singular value above the rank tolerance")]
    ZeroRank,

    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("orthonormal basis has no complement (codim equals dimension {0})")]
    EmptyComplement(usize),

    #[error("residual beyond rank {k} vanishes; ridge parameter would be zero")]
    DegenerateLambda { k: usize },

    #[error(
        "no valid split index: ridge parameter {lambda:e} exceeds the largest squared \
         singular value {sigma1_sq:e} (spectrum too flat for k = {k})"
    )]
    NoValidM { lambda: f64, sigma1_sq: f64, k: usize },

    #[error("degenerate denominator: |AX|_F = 0 but |WAX|_F = {0:e}")]
    DegenerateDenominator(f64),

    #[error("empty cluster {0}")]
    EmptyCluster(usize),

    #[error("zero clustering cost: relative gap undefined")]
    ZeroCost,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
