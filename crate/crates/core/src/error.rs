use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {asymmetry:e} exceeds {tol:e}")]
    NotSymmetric { asymmetry: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid Schmidt state: {0}")]
    InvalidState(String),

    #[error("observable is not of order {order}: max |A^L - I| = {deviation:e}")]
    NotOrderL { order: usize, deviation: f64 },

    #[error("problem too large for the brute-force oracle: d^2 = {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("unsupported dimension d = {dim}: {reason}")]
    BadDimension { dim: usize, reason: String },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("solver stalled after {iterations} iterations ({detail})")]
    SolverStall { iterations: usize, detail: String },

    #[error("criterion is infeasible (best lambda_min = {lambda_min:e})")]
    Infeasible { lambda_min: f64 },

    #[error("target is unreachable: {0}")]
    Unreachable(String),

    #[error("parameter a = {a} lies outside |a| <= {bound}; sgn(X + a D^2) is trivial")]
    TrivialRegion { a: f64, bound: f64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for outcomes that are verdicts about the input rather than failures to
    /// process it.
    pub fn is_domain_verdict(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::Unreachable(_))
    }
}
