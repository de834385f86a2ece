use flute_core::FluteError;
use thiserror::Error;

/// Exit statuses. 0-2 carry the classification, anything above is an error.
pub mod exit {
    pub const FIRST_KIND: u8 = 0;
    pub const NOT_FIRST_KIND: u8 = 1;
    pub const UNDETERMINED: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const COMPUTATION: u8 = 4;
    pub const IO: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Validation and rule errors come from the configuration; the rest
    /// arise while computing.
    pub fn from_core(e: FluteError) -> Self {
        match e {
            FluteError::Validation { .. } | FluteError::RuleViolation { .. } => {
                CliError::Config(e.to_string())
            }
            FluteError::Io(m) => CliError::Io(m),
            other => CliError::Computation(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Computation(_) => exit::COMPUTATION,
            CliError::Io(_) => exit::IO,
        }
    }
}

impl From<FluteError> for CliError {
    fn from(e: FluteError) -> Self {
        CliError::from_core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
