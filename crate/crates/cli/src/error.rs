use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, inconsistent configuration or malformed input data.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qwiener_ldp::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for validation failures, 1 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
