use thiserror::Error;

/// Errors produced by state validation and the numerical routines.
#[derive(Debug, Error)]
pub enum QcError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max entrywise deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (most negative eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    TraceMismatch(f64),

    #[error("state vector norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("SVD failed to converge")]
    SvdFailure,

    #[error("Schmidt coefficient must be strictly positive, got {0}")]
    NonpositiveLambda(f64),

    #[error("q = {0} is outside the domain q >= 2")]
    QOutOfRange(f64),

    #[error("(h, d) = ({h}, {d}) is outside the proven scaling regime")]
    RegimeViolation { h: f64, d: usize },

    #[error("fidelity {0} is outside the required domain")]
    DomainError(f64),

    #[error("unknown closed-form oracle: {0}")]
    UnknownOracle(String),

    #[error("invalid Schmidt spectrum: {0}")]
    InvalidSpectrum(String),
}

pub type Result<T> = std::result::Result<T, QcError>;
