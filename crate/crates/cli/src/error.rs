use std::path::PathBuf;

use thiserror::Error;

/// Failures that end a command with exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Library(#[from] diagsum::Error),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
