use mahler_core::Error as CoreError;

/// Failure of a command, with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    /// Unreadable files, malformed JSON, bad coefficients, invalid equations.
    #[error("input error: {0}")]
    Input(String),
    /// An algebraic extension beyond what the field layer can build.
    #[error("unsupported extension: {0}")]
    Unsupported(String),
    /// A basis whose residual does not vanish.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Any other failure of the pipeline.
    #[error("solver error: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Solver(_) => 1,
            CliError::Unsupported(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        match e {
            CoreError::UnsupportedFactorDegree(_) | CoreError::UnverifiedIrreducibility(_) => {
                CliError::Unsupported(e.to_string())
            }
            CoreError::InvalidEquation(_)
            | CoreError::Malformed(_)
            | CoreError::InvalidField(_)
            | CoreError::Reducible => CliError::Input(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}
