//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by ingestion, matrix algebra, and the evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input line; carries the 1-based line number.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Operands disagree on a dimension.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Invalid or inconsistent configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A linear system that cannot be inverted.
    #[error("singular system: {0}")]
    Singular(String),

    /// The evaluation split has nothing to evaluate.
    #[error("empty evaluation split: {0}")]
    EmptySplit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
