use thiserror::Error;

use crate::phase_matrix::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index window [{lo}, {hi}] is empty")]
    EmptyWindow { lo: i64, hi: i64 },

    #[error("window mismatch: [{}, {}] vs [{}, {}]", .left.0, .left.1, .right.0, .right.1)]
    WindowMismatch { left: (i64, i64), right: (i64, i64) },

    #[error("window [{}, {}] is not contained in [{}, {}]", .inner.0, .inner.1, .outer.0, .outer.1)]
    NotContained { inner: (i64, i64), outer: (i64, i64) },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("vector at index {index} has norm {norm}, expected 1")]
    NonUnitVector { index: i64, norm: f64 },

    #[error("state has norm {norm}, expected 1")]
    NonUnitState { norm: f64 },

    #[error("invalid phase matrix: {0}")]
    Invalid(Box<ValidationReport>),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("arc sets overlap (shared measure {overlap:e})")]
    Overlapping { overlap: f64 },

    #[error("index {index} lies within {required} of the window edge")]
    TooNearEdge { index: i64, required: usize },

    #[error("margins {lower} + {upper} leave no block in a window of dimension {dimension}")]
    MarginTooLarge {
        lower: usize,
        upper: usize,
        dimension: usize,
    },

    #[error("unimodular first off-diagonal contradicts positivity at ({n}, {m}): deviation {deviation:e}")]
    Contradiction { n: i64, m: i64, deviation: f64 },
}
