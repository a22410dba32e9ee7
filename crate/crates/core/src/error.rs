use thiserror::Error;

/// Errors raised by the numrad library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H*| = {deviation:e} exceeds {allowed:e}")]
    NonHermitianInput { deviation: f64, allowed: f64 },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below {allowed:e}")]
    NotPsd { eigenvalue: f64, allowed: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown inequality id `{0}`")]
    UnknownInequality(String),

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error(
        "matrix is not ({alpha}, {beta})-normal (alpha_max = {alpha_max}, beta_min = {beta_min})"
    )]
    NotAlphaBetaNormal {
        alpha: f64,
        beta: f64,
        alpha_max: f64,
        beta_min: f64,
    },

    #[error("operands are not self-adjoint")]
    NotSelfAdjoint,

    #[error("operands do not commute: |ab - ba| = {0:e}")]
    NotCommuting(f64),

    #[error("bad generator spec: {0}")]
    BadSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
