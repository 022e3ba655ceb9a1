use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {required} observations, got {got}")]
    TooFewObservations { required: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("regressor has zero sample variance")]
    ZeroVariance,

    /// Two-regressor determinant `V(x)V(p) - Cov(x,p)^2` fell below the relative tolerance.
    #[error("regressors are collinear (determinant {determinant:e})")]
    Collinear { determinant: f64 },

    #[error("design matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0} needs the latent columns (c, u) of a simulated sample")]
    MissingLatent(&'static str),

    #[error("{estimator} requires a {expected} configuration")]
    ModeMismatch {
        estimator: &'static str,
        expected: &'static str,
    },

    #[error("{failed} of {total} replications failed for {estimator} (first: {first})")]
    TooManyFailures {
        estimator: String,
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("unknown sweep parameter `{0}` (expected alpha2, rho_xc, lambda, deltaX or deltaP)")]
    UnknownParameter(String),

    #[error("numerically singular: {0}")]
    Singular(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
