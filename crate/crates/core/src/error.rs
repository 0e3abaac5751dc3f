use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector/matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The linear system for the threshold conditions is singular.
    #[error("singular condition system (l = {l}, z = {z})")]
    Singular { l: u32, z: usize },

    /// An iterative optimizer hit its iteration cap before converging.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Exhaustive enumeration would exceed the supported problem size.
    #[error("enumeration cap exceeded: {0}; use Monte Carlo instead")]
    CapExceeded(String),

    /// A code description (file or parameters) failed validation.
    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
