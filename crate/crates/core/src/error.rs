use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {0} exceeds the +/-2^62 index guard")]
    IndexOverflow(i128),

    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },

    #[error("window [{lo}, {hi}] does not cover required index {index}")]
    InsufficientWindow { lo: i64, hi: i64, index: i64 },

    #[error("window of {len} entries exceeds the materialization limit")]
    WindowTooLarge { len: u128 },

    #[error("lambda must satisfy |lambda| > 1, got modulus {0}")]
    InvalidLambda(f64),

    #[error("search guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("not enough elements: {0}")]
    InsufficientElements(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("quadrature resolution too coarse: {samples} samples, need at least {required}")]
    Resolution { samples: usize, required: usize },

    #[error("dimension mismatch: expected k = {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
