use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or layout violates a documented bound.
    #[error("configuration error: {0}")]
    Config(String),

    /// A function was evaluated outside of its domain (branch cut, band edge).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to converge or produced an inconsistent result.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A post-processing step was given insufficient data.
    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn analysis(msg: impl Into<String>) -> Self {
        Error::Analysis(msg.into())
    }

    /// Process exit status for the CLI: 2 for bad input, 3 for numerical
    /// or analysis failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Numerical(_) | Error::Analysis(_) => 3,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }

    /// Prefix the message with context, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
            Error::Analysis(m) => Error::Analysis(format!("{ctx}: {m}")),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
