use std::path::PathBuf;

use thiserror::Error;

/// Exit code for invalid arguments, parameters or input data.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit code for numerical failures (quadrature, factorisation, ...).
pub const EXIT_NUMERICAL: u8 = 3;
/// Exit code for I/O failures.
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{path}:{line}: {message}")]
    Input { path: PathBuf, line: usize, message: String },

    #[error(transparent)]
    Core(#[from] scalefisher::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Input { .. } => EXIT_VALIDATION,
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(scalefisher::Error::InsufficientInformation { .. }) => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
