use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluteError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid {field} at index {index}: {message}")]
    Validation {
        field: &'static str,
        index: usize,
        message: String,
    },

    #[error("patchwork rule violated at index {index}: {rule}")]
    RuleViolation { index: usize, rule: String },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("precision exhausted at index {index} with {bits} bits")]
    PrecisionExhausted { index: usize, bits: u32 },

    #[error("refused: {0}")]
    Refused(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FluteError {
    fn from(e: std::io::Error) -> Self {
        FluteError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FluteError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FluteError::Domain(msg.into()))
}
