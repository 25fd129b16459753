use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
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
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}, row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: row {row} has {found} columns, expected {expected}")]
    Shape {
        path: PathBuf,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("labels file has no entry for vertex {0}")]
    MissingLabel(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] mcpc_core::Error),
    #[error("{0} cell(s) aborted")]
    AbortedCells(usize),
}

impl CliError {
    /// Process exit status: 2 for bad configuration or input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => 2,
            CliError::Config(_)
            | CliError::Json { .. }
            | CliError::Parse { .. }
            | CliError::Shape { .. }
            | CliError::MissingLabel(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
