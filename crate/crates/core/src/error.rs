//! Shared error type for the core library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Malformed input file content, with the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Inputs that violate a structural contract (index bounds, empty mesh, ...).
    #[error("structural error: {0}")]
    Structure(String),

    /// Non-finite values produced or encountered during computation.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Dimension or shape mismatch between operands.
    #[error("shape error: {0}")]
    Shape(String),

    /// Inputs that are valid in shape but carry no usable signal
    /// (all-black environment, empty mask, all-zero shading, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Out-of-range pixel or index access.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// A documented operation precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, CoreError>;
