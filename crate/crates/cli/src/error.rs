use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, flags or input files.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Numeric(#[from] dtam_core::Error),
}

impl CliError {
    /// Process exit code: 2 for configuration and input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(dtam_core::Error::Io { .. } | dtam_core::Error::Parse(_)) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
