use std::io;

use lyapcert_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CERTIFIED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad system file or command-line value; `pointer` is a JSON pointer into
    /// the file (empty for the whole document).
    #[error("invalid input at \"{pointer}\": {message}")]
    Input { pointer: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },

    /// Bad command-line value not tied to the system file.
    #[error("{0}")]
    Usage(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn input(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Input { pointer: pointer.into(), message: message.into() }
    }

    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Usage(_) => EXIT_INPUT,
            CliError::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => EXIT_INPUT,
            CliError::Io { .. } | CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse { .. }
            | CoreError::VariableOutOfRange { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::OriginNotEquilibrium { .. }
            | CoreError::NotEquilibrium { .. }
            | CoreError::EmptySamplingPlan
            | CoreError::InvalidArgument(_)
            | CoreError::NotPositiveDefinite(_)
            | CoreError::Unsupported(_) => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
