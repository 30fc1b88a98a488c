use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line front-end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] corrwork_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
}

impl CliError {
    /// 0 success, 1 verification or I/O failure, 2 usage error, 3 infeasible.
    pub fn exit_code(&self) -> i32 {
        use corrwork_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Core(E::Infeasible { .. } | E::UnreachableBias { .. }) => 3,
            CliError::Core(E::Numerical { .. }) => 1,
            CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Verification { .. } | CliError::Csv { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
