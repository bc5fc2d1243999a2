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

    #[error("{path}:{line}: {message}")]
    Record { path: PathBuf, line: u64, message: String },

    #[error("{0}")]
    Input(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Numerical(#[from] llfit_core::Error),

    #[error("{0}")]
    Output(String),
}

impl CliError {
    /// 1 for anything the user can fix in their input, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { key: key.into(), message: message.into() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
