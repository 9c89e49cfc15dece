use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NonPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("power budget `{name}` must be positive and finite, got {value}")]
    NonPositivePower { name: &'static str, value: f64 },

    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),

    #[error("mu must be nonnegative and finite, got {0}")]
    InvalidMu(f64),

    #[error("operation requires mu >= 1, got {0}")]
    UnsupportedMu(f64),

    #[error("failed to parse channel spec: {0}")]
    Parse(String),

    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(String),

    #[error("solver diverged: {0}")]
    SolverDiverged(String),

    #[error("alpha minimizer still touches the bracket edge after widening to [{lo:e}, {hi:e}]")]
    BracketUnbounded { lo: f64, hi: f64 },

    #[error("noise coupling makes Sigma_z singular or indefinite")]
    SingularSigmaZ,

    #[error("noise covariance is singular")]
    SingularNoise,

    #[error("grid oracle needs {params} free scalar parameters (limit {limit})")]
    OracleTooLarge { params: usize, limit: usize },

    #[error("channel matrix is zero")]
    ZeroChannel,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
