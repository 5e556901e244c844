use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration budget exceeded: C({n},{k}) = {subsets} subsets, limit {limit}")]
    BudgetExceeded {
        n: usize,
        k: usize,
        subsets: u128,
        limit: u128,
    },

    #[error("generator gave up after {attempts} disconnected attempts")]
    RetryCapExceeded { attempts: usize },

    #[error("backend failure: {0}")]
    Backend(String),

    /// Something that can only happen if an encoding is wrong.
    #[error("encoding inconsistency: {0}")]
    Encoding(String),

    #[error("constraint `{name}` violated: {detail}")]
    ConstraintViolated { name: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
