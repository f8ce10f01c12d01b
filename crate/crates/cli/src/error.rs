use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("physical precondition failed: {0}")]
    Precondition(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Io(_) => 4,
        })
    }
}

impl From<ab_mixture::Error> for CliError {
    fn from(e: ab_mixture::Error) -> Self {
        match e {
            ab_mixture::Error::Validation(msgs) => CliError::Validation(msgs),
            ab_mixture::Error::Precondition(msg) => CliError::Precondition(msg),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
