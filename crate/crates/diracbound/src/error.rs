use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum DiracError {
    #[error("unsupported dimension n = {0}; supported dimensions are 2 and 3")]
    Dimension(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported combination: {0}")]
    Capability(String),
    #[error("geometry has no boundary")]
    NoBoundary,
    #[error("resolution {got} too small; need at least {min}")]
    Resolution { got: usize, min: usize },
    #[error("operator is not Hermitian (adjoint residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("solver did not converge; best residual {best_residual:.3e}")]
    Convergence { best_residual: f64 },
    #[error("root search incomplete: contour predicts {expected} roots, located {found}")]
    IncompleteSearch { expected: usize, found: usize },
    #[error("missing argument: {0}")]
    MissingArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DiracError>;

impl DiracError {
    pub fn parameter(msg: impl Into<String>) -> Self {
        DiracError::Parameter(msg.into())
    }
    pub fn capability(msg: impl Into<String>) -> Self {
        DiracError::Capability(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        DiracError::Config(msg.into())
    }
}
