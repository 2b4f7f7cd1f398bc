use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data, e.g. a non-convex table.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A named mathematical hypothesis of the requested construction fails.
    #[error("condition `{condition}` violated: {detail}")]
    Precondition { condition: String, detail: String },

    /// A numerical procedure could not reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A decision could not be made from the available numerical evidence.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn precondition(condition: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Precondition { condition: condition.into(), detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
