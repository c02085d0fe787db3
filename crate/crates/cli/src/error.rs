use thiserror::Error;

/// Failures of a CLI run, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration or arguments.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] skyhaul::Error),

    /// At least one validation metric fell outside its tolerance band.
    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(skyhaul::Error::NonConvergence { .. }) => 3,
            // Domain and parameter errors come from inputs the model cannot represent.
            CliError::Model(_) => 2,
            CliError::ValidationFailed(_) => 4,
            CliError::Output(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
