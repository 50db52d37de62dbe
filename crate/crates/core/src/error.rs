use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller asked for something outside an operation's domain.
    #[error("usage: {0}")]
    Usage(String),

    /// A row or triangle violates one of its structural invariants.
    #[error("integrity: row 2^{exponent}: {reason}")]
    Integrity { exponent: u32, reason: String },

    /// Text could not be parsed into a triangle.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// An allocation for the given exponent could not be satisfied.
    #[error("resource exhaustion while building row 2^{exponent}: {reason}")]
    Resource { exponent: u32, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn integrity(exponent: u32, reason: impl Into<String>) -> Self {
        Error::Integrity {
            exponent,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Integrity { .. } | Error::Parse { .. } => 3,
            Error::Resource { .. } => 4,
            Error::Io { .. } => 1,
        }
    }
}
