use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix/vector dimension mismatch or ill-shaped input.
    #[error("shape error: {0}")]
    Shape(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Valid parameters that the selected engine cannot handle.
    #[error("unsupported model: {0}")]
    Unsupported(String),

    /// Problem size over a hard resource cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A numerical step failed to reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Iterative solver did not converge.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Internal cross-check failed (result not trustworthy).
    #[error("numerical consistency: {0}")]
    Inconsistency(String),

    /// Bad sweep/CLI configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
