use std::process::ExitCode;

use cmguard_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or inconsistent configuration or input files.
    #[error("{0}")]
    Input(String),
    /// A simulation invariant failed; names the invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Invariant(_) => ExitCode::from(3),
        }
    }

    pub fn io(what: impl std::fmt::Display, e: std::io::Error) -> Self {
        CliError::Input(format!("{what}: {e}"))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Invariant(what) => CliError::Invariant(what.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
