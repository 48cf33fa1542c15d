use thiserror::Error;

/// Errors produced by the analysis, design and identification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("depth {k} out of range for a sequence of {len} samples")]
    DepthOutOfRange { k: i64, len: usize },

    #[error("sequence of length {len} is too short for excitation order {order}")]
    SequenceTooShort { len: usize, order: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input sequence is identically zero, so the shortest lag is undefined.
    #[error("input sequence is identically zero")]
    ZeroInput,

    #[error("prior bounds violated: {0}")]
    PriorBoundsViolated(String),

    /// `rank G_{k,t} = m + rank H_{k-1,t}`: no further rank increase at this depth.
    #[error("depth exhausted at k = {k}, t = {t}")]
    DepthExhausted { k: usize, t: usize },

    #[error("recorded input at t = {t} lies on the avoidance hyperplane")]
    InputOnHyperplane { t: usize },

    #[error("replay diverged at t = {t}: {reason}")]
    Replay { t: usize, reason: String },

    #[error("system is not minimal")]
    NotMinimal,

    #[error("gave up after {0} draws")]
    DrawLimit(usize),

    #[error("data not informative: {0}")]
    NotInformative(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
