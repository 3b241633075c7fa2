use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("mass functions are defined over different frames")]
    FrameMismatch,

    /// Combination would divide by `1 - K` with `K` numerically equal to one.
    #[error("fusion undefined (K=1): total conflict, conflict coefficient {conflict}")]
    TotalConflict { conflict: f64 },

    #[error("evidence set is empty")]
    EmptyEvidence,

    #[error("{what}: need at least {needed} evidences, got {got}")]
    TooFewEvidences {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("weights must sum to 1, got {0}")]
    WeightSum(f64),

    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    #[error("{0}")]
    Parse(String),
}

impl Error {
    pub fn is_total_conflict(&self) -> bool {
        matches!(self, Error::TotalConflict { .. })
    }
}
