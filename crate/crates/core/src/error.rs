use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped loosely by the layer that produces them; callers
/// usually only match on a handful of them (the CLI maps them to exit codes).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // linear algebra
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e} > {tol:.1e})")]
    NonHermitian { asymmetry: f64, tol: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    // states and channels
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("operator trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("Kraus operators are not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("Kraus product set of size {size} exceeds cap {cap}; apply channels sequentially instead")]
    KrausExplosion { size: usize, cap: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("fixed point is not unique ({multiplicity} singular values within tolerance)")]
    NonUniqueFixedPoint { multiplicity: usize },
    #[error("no fixed point found (residual {residual:.3e})")]
    NoFixedPointFound { residual: f64 },
    #[error("not a probability distribution: {0}")]
    NotDistribution(String),
    #[error("not a stochastic matrix: {0}")]
    NotStochastic(String),

    // divergences
    #[error("no finite gamma satisfies the smoothing constraint")]
    Infinite,
    #[error("f-divergence diverges")]
    Divergent,
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    // contraction
    #[error("classical channel needs at least two inputs")]
    TooFewInputs,

    // bounds and privacy
    #[error("parameter out of range: {0}")]
    BadRange(String),
    #[error("minimum eigenvalue must be positive")]
    ZeroLambdaMin,
    #[error("degenerate interpolation interval")]
    DegenerateInterval,
    #[error("linear contraction rate {rate} is not below 1")]
    ContractionNotStrict { rate: f64 },
    #[error("fixed point is not full rank")]
    FixedPointNotFullRank,

    // io
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bad_range(msg: impl Into<String>) -> Error {
    Error::BadRange(msg.into())
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
