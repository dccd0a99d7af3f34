use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Bad configuration, flags or parameters.
pub const EXIT_VALIDATION: i32 = 2;
/// A consistency check on the computed results failed.
pub const EXIT_INVARIANT: i32 = 3;
/// Reading the config or writing results failed.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] spacetime_core::Error),
    #[error("invalid config {path}: {source}")]
    Config {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(_) | CliError::Config { .. } => {
                EXIT_VALIDATION
            }
            CliError::Io { .. } | CliError::Output(_) => EXIT_IO,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
