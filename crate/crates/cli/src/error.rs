use std::path::PathBuf;

use thiserror::Error;
use wmp_core::WmpError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_MATH: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("missing role `{0}` (supply it in the bundle or with --role {0}=<path>)")]
    MissingRole(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Wmp(#[from] WmpError),
    /// A check the command was asked to perform did not pass.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Wmp(e) if e.is_mathematical() => EXIT_MATH,
            CliError::Failed(_) => EXIT_MATH,
            _ => EXIT_INPUT,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
