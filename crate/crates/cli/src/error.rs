use thiserror::Error;

/// Exit codes of the `selfbound` binary.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NO_CONVERGENCE: i32 = 3;
    pub const GRID_VIOLATION: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Command-line syntax; carries clap's rendered message.
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("grid violation: {0}")]
    GridViolation(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => exit::VALIDATION,
            CliError::NoConvergence(_) => exit::NO_CONVERGENCE,
            CliError::GridViolation(_) => exit::GRID_VIOLATION,
            CliError::Io(_) => exit::IO,
            CliError::Other(_) => exit::OTHER,
        }
    }
}

impl From<selfbound::Error> for CliError {
    fn from(e: selfbound::Error) -> Self {
        use selfbound::Error as E;
        match e {
            E::Domain(_) | E::LengthMismatch { .. } | E::ZeroNorm => CliError::Validation(e.to_string()),
            E::Integration { .. } | E::NoConvergence { .. } | E::Overflow { .. } => {
                CliError::NoConvergence(e.to_string())
            }
            E::GridViolation { .. } => CliError::GridViolation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
