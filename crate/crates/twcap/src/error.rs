//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed channel file syntax.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed input that violates a probability invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Mismatched vector/matrix dimensions between arguments.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Symbol index outside the relevant alphabet.
    #[error("index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    /// A grid sweep would exceed the evaluation cap; retry with a coarser delta.
    #[error("grid sweep of {required} evaluations exceeds the cap of {cap}; use a coarser delta")]
    EvalCapExceeded { required: u128, cap: u64 },

    /// A grid point count does not fit in u64.
    #[error("grid point count overflows u64 (dim {dim}, delta {delta})")]
    CountOverflow { dim: usize, delta: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
