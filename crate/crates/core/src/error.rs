use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget below feature count: m = {m}, n = {n}")]
    BudgetBelowFeatureCount { m: usize, n: usize },
    #[error("budget must be even for paired sampling, got m = {0}")]
    OddBudget(usize),
    #[error("budget exceeds number of subsets: m = {m} > 2^{n}")]
    BudgetAboveSubsets { m: usize, n: usize },
    #[error("enumeration too large: n = {n} exceeds limit {limit}")]
    EnumerationTooLarge { n: usize, limit: usize },
    #[error("player count {0} outside supported range 1..=63")]
    PlayerCount(usize),
    #[error("no baseline data")]
    NoBaselineData,
    #[error("noise sigma must be finite and non-negative, got {0}")]
    NegativeNoise(f64),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("NaN feature value at index {0}")]
    NanFeature(usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("model schema violation at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for I/O and parse failures of external files, as opposed to
    /// violated preconditions of an operation.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Json(_) | Error::Csv(_))
    }
}
