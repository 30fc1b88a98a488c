use thiserror::Error;

/// Errors raised by state construction, linear algebra and the analytic bounds.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("global dimension {dim} exceeds the configured cap {cap}")]
    Capacity { dim: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Validity(String),

    #[error("eigensolver did not converge after {iterations} iterations (block of size {size})")]
    Numerical { iterations: usize, size: usize },

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {reason} (achievable range [{lo:.6}, {hi:.6}])")]
    Infeasible { reason: String, lo: f64, hi: f64 },

    #[error("bias {target} is not reachable from a product state with bias {available}")]
    UnreachableBias { target: f64, available: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
