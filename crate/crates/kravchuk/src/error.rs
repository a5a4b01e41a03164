//! Error type shared by every module in the crate.

use thiserror::Error;

/// Unified error enumeration.
///
/// Variants map one-to-one onto the failure classes of the public API:
/// mathematical preconditions (`Domain`, `Range`), data-shape mismatches
/// (`Shape`, `Normalization`), configuration and selection problems in the
/// experiment simulator (`Config`, `EmptySelection`, `Degenerate`,
/// `Division`), and I/O-adjacent parsing (`Parse`, `Format`, `Io`).
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural size argument exceeds the supported range.
    #[error("range error: {0}")]
    Range(String),

    /// Matrix/vector/grid dimensions do not match.
    #[error("shape error: {0}")]
    Shape(String),

    /// A state vector that must be normalized is not.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Post-selection matched no records.
    #[error("empty selection: {0}")]
    EmptySelection(String),

    /// Degenerate input (e.g. all-zero counts) for a statistic.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Division by a zero count.
    #[error("division error: {0}")]
    Division(String),

    /// Text input failed to parse; carries a 1-based line number when known.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Binary input failed to decode; carries a byte offset when known.
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: usize, msg: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
    pub(crate) fn normalization(msg: impl Into<String>) -> Self {
        Error::Normalization(msg.into())
    }
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub(crate) fn empty_selection(msg: impl Into<String>) -> Self {
        Error::EmptySelection(msg.into())
    }
    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
    pub(crate) fn division(msg: impl Into<String>) -> Self {
        Error::Division(msg.into())
    }
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
    pub(crate) fn format(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format { offset, msg: msg.into() }
    }
}
