use thiserror::Error;

pub type Result<T, E = QotError> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum QotError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NonHermitianInput { asymmetry: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("matrix has negative eigenvalue {eigenvalue:.3e} below the PSD tolerance")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("Choi matrix is not PSD: smallest eigenvalue {eigenvalue:.3e}")]
    NotPsd { eigenvalue: f64 },

    #[error("unitality violated: ||sum v_j^* v_j - 1|| = {residual:.3e}")]
    BrokenUnitality { residual: f64 },

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("element is not supported on the state's support: deviation {deviation:.3e}")]
    SupportViolation { deviation: f64 },

    #[error("marginal mismatch: ||Phi_*(sigma) - rho||_1 = {deviation:.3e}")]
    MarginalMismatch { deviation: f64 },

    #[error("tuple length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl QotError {
    /// Numerical breakdown of an iterative method, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Self::NumericalFailure(_) | Self::ConvergenceFailure { .. })
    }
}

impl From<serde_json::Error> for QotError {
    fn from(e: serde_json::Error) -> Self {
        QotError::Parse(e.to_string())
    }
}

pub(crate) fn dim_mismatch(what: impl Into<String>) -> QotError {
    QotError::DimensionMismatch(what.into())
}
