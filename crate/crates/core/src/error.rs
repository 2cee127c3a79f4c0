use thiserror::Error;

use crate::CMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Last ADMM state when the inner SDP stops before meeting its tolerance.
#[derive(Debug, Clone)]
pub struct SdpFailure {
    pub last_iterate: CMatrix,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("Hermitian eigensolver did not converge on a {0}x{0} matrix")]
    EigenNonConvergence(usize),

    #[error("singular linear system: {0}")]
    Singular(&'static str),

    #[error(
        "inner SDP did not converge after {} iterations (primal {:e}, dual {:e})",
        .0.iterations, .0.primal_residual, .0.dual_residual
    )]
    SdpNonConvergence(Box<SdpFailure>),

    #[error("no penalty weight up to {gamma_hi:e} yields a rank-one solution (rank gap {rank_gap:e})")]
    GammaRangeExhausted { gamma_hi: f64, rank_gap: f64 },

    #[error("channel inversion undefined for |h| = {0:e}")]
    ZeroChannel(f64),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}
