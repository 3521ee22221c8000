//! Batch identifiers.
//!
//! A batch of event types `[t0, t1, ..., t(k-1)]`, listed in execution order,
//! is the integer `sum t_i * base^i` with `base = |alphabet| + 1`. Digit 0 is
//! the "no event" slot. Without it a leading type would vanish from the id;
//! with it, ids that carry a 0 digit below their most significant digit decode
//! to the same sequence as a shorter id and are redundant.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::EventTypeId;

/// Integer code of an event-type sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BatchId(pub u64);

impl BatchId {
    /// The empty batch.
    pub const EMPTY: BatchId = BatchId(0);

    pub const fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for BatchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Alphabet size and maximum batch length of one id space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    alphabet_size: u32,
    max_batch_len: u32,
    base: u64,
    total: u64,
}

/// Ids that are generated but can never be produced by the scheduler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Redundancy {
    pub redundant: u64,
    pub fraction: f64,
}

impl CodecConfig {
    /// Fails with `ConfigTooLarge` when `B` (or `B + 1` entries) does not fit
    /// in a `u64`.
    pub fn new(alphabet_size: u32, max_batch_len: u32) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if max_batch_len == 0 {
            return Err(Error::InvalidParameter("maximum batch length must be at least 1".into()));
        }
        let base = u64::from(alphabet_size) + 1;
        let too_large = || {
            Error::ConfigTooLarge(format!(
                "batch ids for {alphabet_size} types and length {max_batch_len} overflow 64 bits"
            ))
        };
        let total = geometric_sum(base, max_batch_len).ok_or_else(too_large)?;
        total.checked_add(1).ok_or_else(too_large)?;
        Ok(Self { alphabet_size, max_batch_len, base, total })
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn max_batch_len(&self) -> u32 {
        self.max_batch_len
    }

    /// `|alphabet| + 1`.
    pub fn base(&self) -> u64 {
        self.base
    }

    /// `B = sum_{i=1}^{n} (|alphabet| + 1)^i`, the largest valid id.
    pub fn total_batch_count(&self) -> u64 {
        self.total
    }

    /// `sum_{i=1}^{n} |alphabet|^i`: ids without an interior "no event" digit.
    pub fn reachable_batch_count(&self) -> u64 {
        // Bounded by the total, which already fits.
        geometric_sum(u64::from(self.alphabet_size), self.max_batch_len)
            .expect("reachable count is bounded by the total count")
    }

    pub fn redundant_batch_count(&self) -> Redundancy {
        let redundant = self.total - self.reachable_batch_count();
        Redundancy { redundant, fraction: redundant as f64 / self.total as f64 }
    }

    /// Encodes an execution-ordered sequence; the first event is the least
    /// significant digit.
    pub fn encode(&self, seq: &[EventTypeId]) -> Result<BatchId> {
        if seq.len() > self.max_batch_len as usize {
            return Err(Error::SequenceTooLong { len: seq.len(), max: self.max_batch_len });
        }
        let mut id = 0u64;
        let mut weight = 1u64;
        for &type_id in seq {
            self.check_type(type_id)?;
            id += u64::from(type_id.get()) * weight;
            weight = weight.wrapping_mul(self.base);
        }
        Ok(BatchId(id))
    }

    /// Recovers the execution-ordered sequence. "No event" digits are skipped
    /// wherever they occur, so redundant ids decode to their projection.
    pub fn decode(&self, id: BatchId) -> Result<Vec<EventTypeId>> {
        self.check_id(id)?;
        let mut rest = id.0;
        let mut seq = Vec::with_capacity(self.max_batch_len as usize);
        while rest > 0 {
            let digit = (rest % self.base) as u32;
            if let Some(type_id) = EventTypeId::new(digit) {
                seq.push(type_id);
            }
            rest /= self.base;
        }
        Ok(seq)
    }

    /// True iff `id > 0` and no digit below the most significant one is 0,
    /// i.e. the id is one the scheduler can produce.
    pub fn is_reachable(&self, id: BatchId) -> Result<bool> {
        self.check_id(id)?;
        if id.0 == 0 {
            return Ok(false);
        }
        let mut rest = id.0;
        while rest > 0 {
            if rest.is_multiple_of(self.base) {
                return Ok(false);
            }
            rest /= self.base;
        }
        Ok(true)
    }

    fn check_id(&self, id: BatchId) -> Result<()> {
        if id.0 > self.total {
            return Err(Error::IdOutOfRange { id: id.0, max: self.total });
        }
        Ok(())
    }

    fn check_type(&self, type_id: EventTypeId) -> Result<()> {
        if type_id.get() > self.alphabet_size {
            return Err(Error::InvalidTypeId { type_id: type_id.get(), alphabet: self.alphabet_size });
        }
        Ok(())
    }
}

/// `sum_{i=1}^{n} base^i` with overflow detection.
fn geometric_sum(base: u64, n: u32) -> Option<u64> {
    let mut power = 1u64;
    let mut total = 0u64;
    for _ in 0..n {
        power = power.checked_mul(base)?;
        total = total.checked_add(power)?;
    }
    Some(total)
}
