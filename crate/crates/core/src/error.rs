use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("negative eigenvalue {0:.3e} in a state that should be positive semidefinite")]
    NegativeEigenvalue(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("channel is not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("parameter out of domain: {0}")]
    DomainError(String),

    #[error("optimizer diverged: {0}")]
    OptimizerDiverged(String),

    #[error("SDP solver hit the iteration limit (gap {gap:.3e}, primal infeasibility {primal_infeasibility:.3e}, dual infeasibility {dual_infeasibility:.3e})")]
    MaxIterations {
        gap: f64,
        primal_infeasibility: f64,
        dual_infeasibility: f64,
    },

    #[error("numerical breakdown in SDP solver: {0}")]
    NumericalBreakdown(String),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("closed form disagrees with Kraus evaluation by {deviation:.3e}")]
    ClosedFormMismatch { deviation: f64 },

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
}
