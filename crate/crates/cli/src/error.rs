use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    /// 1 usage, 2 I/O, 3 invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Csv { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<favedge_core::stats::StatError> for CliError {
    fn from(e: favedge_core::stats::StatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<favedge_core::oracle::OracleError> for CliError {
    fn from(e: favedge_core::oracle::OracleError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
