use std::path::PathBuf;

use fusionsim_core::Error as CoreError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: existing header does not match the {experiment} schema")]
    HeaderMismatch { path: PathBuf, experiment: String },
    #[error("policy table {path}, line {line}: {message}")]
    Table { path: PathBuf, line: usize, message: String },
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad input, 3 for failed checks, 4 when a
    /// solver gives up, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Parse(_) | CliError::Table { .. } => 2,
            CliError::Core(CoreError::InputDomain(_)) => 2,
            CliError::Verification(_) => 3,
            CliError::Core(
                CoreError::IterationLimit { .. } | CoreError::Oscillation { .. } | CoreError::BracketExpansion { .. },
            ) => 4,
            _ => 1,
        }
    }
}
