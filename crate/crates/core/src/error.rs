use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DfsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what} is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { what: String, deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    #[error("coefficient matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("integrator did not converge within {cap} steps (last difference {difference:.3e})")]
    StepCapExceeded { cap: usize, difference: f64 },

    #[error("model too large: {0}")]
    TooLarge(String),

    #[error("Fock truncation too small: n_max = {n_max}, need at least {required}")]
    TruncationTooSmall { n_max: usize, required: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = DfsError> = std::result::Result<T, E>;
