//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated an operation's preconditions.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An exhaustive operation was requested above its enumeration guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Input data was outside the declared domain.
    #[error("invalid data: {0}")]
    Data(String),

    /// A preprocessing was applied to an operand kind it is not defined for.
    #[error("unsupported preprocessing: {0}")]
    Unsupported(String),

    /// Strict-mode evaluation saw a raw input outside its natural range.
    #[error("natural-range violation: {0}")]
    RangeViolation(String),

    /// An accumulator would have wrapped.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// Two containers that must agree in shape did not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("PLA parse error at line {line}: {msg}")]
    PlaParse { line: usize, msg: String },

    #[error("image format error: {0}")]
    ImageFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
