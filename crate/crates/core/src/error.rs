use thiserror::Error;

use crate::model::{EventTypeId, Timestamp};

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model registers no event handlers")]
    EmptyAlphabet,

    #[error("no lookahead declared for event type {0}")]
    MissingLookahead(EventTypeId),

    #[error("event type {0} declares a negative lookahead ({1})")]
    NegativeLookahead(EventTypeId, i64),

    #[error("event type {type_id} is outside the alphabet 1..={alphabet}")]
    InvalidTypeId { type_id: u32, alphabet: u32 },

    #[error("batch of {len} events exceeds the maximum batch length {max}")]
    SequenceTooLong { len: usize, max: u32 },

    #[error("batch id {id} lies outside 0..={max}")]
    IdOutOfRange { id: u64, max: u64 },

    #[error("configuration too large: {0}")]
    ConfigTooLarge(String),

    #[error("model was composed for {composed} event types, configuration asks for {requested}")]
    AlphabetMismatch { composed: u32, requested: u32 },

    #[error(
        "event type {child_type} at t={child_time} created by type {creator_type} at \
         t={creator_time} violates lookahead {lookahead}"
    )]
    LookaheadViolation {
        child_type: EventTypeId,
        child_time: Timestamp,
        creator_type: EventTypeId,
        creator_time: Timestamp,
        lookahead: u64,
    },

    #[error("future event set is empty")]
    EmptyQueue,

    #[error("batch table has no entry for id {0}")]
    MissingBatchEntry(u64),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("degenerate probability p_I = {p_increment}; analytic limit is {limit}")]
    DegenerateProbability { p_increment: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
