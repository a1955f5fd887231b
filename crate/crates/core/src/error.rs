use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested combination of parameters has no implementation or closed form.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    /// A configured size or work budget would be exceeded.
    #[error("resource limit exceeded: {what} ({requested} > {limit})")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// A grid supremum kept growing under refinement.
    #[error("supremum did not converge: {0}")]
    Divergent(String),

    /// A weight lookup found no entry for a multi-index.
    #[error("missing weight for multi-index {0}")]
    MissingWeight(String),

    /// Inconsistent dimensions between inputs.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A user supplied function or gradient failed to evaluate.
    #[error("oracle failure: {0}")]
    Oracle(String),

    /// A text or binary input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
