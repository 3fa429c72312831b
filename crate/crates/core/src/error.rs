use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid direction grid: {0}")]
    InvalidGrid(String),

    #[error("direction grid is empty")]
    EmptyGrid,

    #[error("bodies are embedded on different direction grids")]
    GridMismatch,

    #[error("embedded body queried off its direction grid (no interpolation between grid directions)")]
    OffGrid,

    #[error("invalid convex body: {0}")]
    InvalidBody(String),

    #[error("negative scalar multiple of an embedded body requires an antipodal-closed grid")]
    NotAntipodalClosed,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid family specification: {0}")]
    InvalidFamily(String),

    #[error("scalar process produced a negative multiplier {value} at index {index}")]
    NegativeScalar { index: usize, value: f64 },

    #[error("need at least {needed} {what}, got {got}")]
    InsufficientSamples {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("negative variance {value} at index {index}, direction {direction}")]
    NegativeVariance { index: usize, direction: usize, value: f64 },

    #[error("input is not an interval: {0}")]
    NotAnInterval(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("variance condition violated: {0}")]
    ConditionViolated(String),

    #[error("report has no analytic bound (descriptive mode)")]
    MissingBound,
}
