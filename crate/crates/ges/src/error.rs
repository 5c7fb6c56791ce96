use thiserror::Error;

use crate::formats::FormatError;

/// Errors surfaced by the CLI, each with a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 2.
    #[error("parameter violation: {0}")]
    Param(String),
    /// Exit 3.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Exit 3.
    #[error("{path}: {source}")]
    Format {
        path: String,
        #[source]
        source: FormatError,
    },
    /// Exit 4.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// Exit 5.
    #[error("certification failed: {0}")]
    Certification(String),
    /// Exit 6.
    #[error("recovery guarantee violated: {0}")]
    Guarantee(String),
    /// Exit 1.
    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Selftest(_) => 1,
            CliError::Param(_) => 2,
            CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Invariant(_) => 4,
            CliError::Certification(_) => 5,
            CliError::Guarantee(_) => 6,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<String>, source: FormatError) -> Self {
        CliError::Format {
            path: path.into(),
            source,
        }
    }
}
