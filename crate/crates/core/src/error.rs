use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("matrix dimension {0} exceeds the supported maximum of {max}", max = crate::linalg::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error(
        "operator is not positive semi-definite: eigenvalue {0:e} is below the clamp tolerance"
    )]
    NotPositive(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range 1..={len}")]
    OutOfRange { index: usize, len: usize },
    #[error("estimation window has {points} points; at least {required} are required")]
    WindowTooSmall { points: usize, required: usize },
    #[error("rate fit needs at least 4 positive samples, found {usable} ({excluded} excluded at the roundoff floor)")]
    TooFewSamples { usable: usize, excluded: usize },
    #[error("error curves do not share the same n-grid and t")]
    GridMismatch,
    #[error("Kato function `{name}` failed validation: {reason}")]
    KatoValidation { name: String, reason: String },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
