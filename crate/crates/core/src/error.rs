use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime below 2^32")]
    BadModulus(u64),

    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(String, String),

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("polynomial still depends on z_{0}; evaluate the z-block first")]
    UnevaluatedZ(usize),

    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("exponent override rejected: {0}")]
    BadExponents(String),

    #[error("multi-index {0:?} is not in the weight basis")]
    BadMultiIndex(Vec<u32>),

    #[error("coordinates must be pairwise distinct in F_p: {0:?}")]
    CoincidentPoints(Vec<u64>),

    /// A conditional statement was asked about while its hypothesis fails.
    #[error("hypothesis not met: {0}")]
    Precondition(String),

    /// The identity does not apply to this input (e.g. a degree bound fails).
    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
