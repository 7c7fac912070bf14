use thiserror::Error;

/// Errors raised by the models and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of a formula (nonpositive fading,
    /// negative power, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or matrix lengths do not match the system dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Zero-forcing needs strictly more antennas than users.
    #[error("zero-forcing requires M > K (M = {antennas}, K = {users})")]
    DetectorInfeasible { antennas: usize, users: usize },

    /// A requested signal power or pilot length cannot be reached.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative method hit its iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The instance has no meaningful solution (for example K = T).
    #[error("degenerate instance: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
