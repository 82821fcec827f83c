use thiserror::Error;

/// Errors surfaced by samplers, evaluators and the harness.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("numerical failure in {what}: {diagnostics}")]
    NumericalFailure { what: String, diagnostics: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        SimError::InvalidArgument(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        SimError::ResourceLimit(msg.into())
    }

    pub fn numerical(what: impl Into<String>, diagnostics: impl Into<String>) -> Self {
        SimError::NumericalFailure {
            what: what.into(),
            diagnostics: diagnostics.into(),
        }
    }
}

pub type SimResult<T> = Result<T, SimError>;
