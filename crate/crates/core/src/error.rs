use thiserror::Error;

use crate::frame::{HistoryId, PlayerId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("events are bound to different frames")]
    FrameMismatch,

    #[error("operation `{op}` expects {expected} operand(s), got {got}")]
    Arity { op: &'static str, expected: &'static str, got: usize },

    #[error("unknown player {0:?}")]
    UnknownPlayer(PlayerId),

    #[error("unknown history {0:?}")]
    UnknownHistory(HistoryId),

    #[error("point ({history}, {time}) is outside the frame")]
    PointOutOfRange { history: usize, time: usize },

    #[error("player set must not be empty")]
    EmptyPlayerSet,

    #[error("event for player {0:?} is not local to that player")]
    NotLocal(PlayerId),

    #[error("player {0:?} is not part of the profile")]
    NotInProfile(PlayerId),

    #[error("event is not time-invariant")]
    NotTimeInvariant,

    #[error("event is not singular")]
    NotSingular,

    #[error("event does not occur in every history")]
    NotEverywhereOccurring,

    #[error("ken of the queried point is not singular")]
    NonSingularKen,

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid input: {0}")]
    InvalidSpec(String),

    #[error("enumeration cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("horizon too short: {0}")]
    HorizonTooShort(String),

    #[error("no stabilization within the horizon: {0}")]
    NoStabilization(String),

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("cross-validation failed: {0}")]
    CrossValidation(String),
}
