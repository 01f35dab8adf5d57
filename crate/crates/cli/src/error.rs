use std::path::PathBuf;

use thiserror::Error;

/// Exit code for malformed input, bad flags and problems that cannot be built.
pub const EXIT_INPUT: u8 = 4;
/// Exit code for failures after a problem was accepted.
pub const EXIT_INTERNAL: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: regsos::Error },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Build(regsos::Error),

    #[error(transparent)]
    Runtime(regsos::Error),

    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Input(_) | CliError::Build(_) => EXIT_INPUT,
            CliError::Runtime(_) | CliError::Write { .. } => EXIT_INTERNAL,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
