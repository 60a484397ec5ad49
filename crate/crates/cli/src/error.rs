use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Oracle and solver disagree beyond the discretization bound.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    BadInput(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::BadInput(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<duopoly_core::Error> for CliError {
    fn from(e: duopoly_core::Error) -> Self {
        CliError::BadInput(e.to_string())
    }
}
