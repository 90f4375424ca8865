use thiserror::Error;

/// Errors produced anywhere in the estimation, denoising and I/O stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: right endpoint {b} must exceed left endpoint {a}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid grid size {0}: need at least 2 points")]
    InvalidSize(usize),
    #[error("curve values must be finite")]
    NonFinite,
    #[error("curves live on different grids")]
    GridMismatch,
    #[error("basis is not orthonormal: Gram matrix deviates from identity by {deviation:e}")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("curve series is empty")]
    EmptySeries,
    #[error("series of length {n} too short for lag {lag}")]
    SeriesTooShort { n: usize, lag: usize },
    #[error("all DFPCA lag weights are zero")]
    AllZeroCoefficients,
    #[error("kernel is not symmetric (relative asymmetry {0:e})")]
    AsymmetricKernel(f64),
    #[error("lag-{lag} autocovariance matrix is singular (condition number {condition:e})")]
    SingularLagMatrix { lag: usize, condition: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("noise covariance has no positive eigenvalues")]
    NoPositiveEigenvalues,
    #[error("perpendicular noise covariance is singular (condition number {0:e})")]
    SingularOmegaPerp(f64),
    #[error("input has zero integrated variance")]
    ZeroVarianceInput,
    #[error("VAR model is not stationary (spectral radius {0})")]
    NonStationaryModel(f64),
    #[error("no positive semi-definite innovation covariance after {0} draws")]
    RetryLimitExceeded(usize),
    #[error("regressor matrix is rank deficient")]
    RankDeficientRegressors,
    #[error("forecast needs {needed} history rows, got {got}")]
    InsufficientHistory { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing cell for date {date}")]
    MissingCell { date: String },
    #[error("duplicate entry for date {date}, position {position}")]
    DuplicateKey { date: String, position: usize },
    #[error("dates are not strictly increasing at {date}")]
    NonMonotoneDates { date: String },
    #[error("panel has degenerate (zero) variance")]
    DegenerateVariance,
    #[error("unknown model name {0:?}")]
    UnknownModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
