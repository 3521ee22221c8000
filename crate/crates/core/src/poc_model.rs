//! Synthetic two-event model: `Increment` runs a long loop on a shared sum,
//! `Set` overwrites the sum with a constant. An `Increment` followed by a
//! `Set` in the same composed batch is dead work that the optimizer removes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    Event, EventRequest, EventTypeId, HandlerFn, HandlerOutcome, LookaheadTable, Model, ModelDefinition,
    Timestamp,
};

pub const INCREMENT: EventTypeId = match EventTypeId::new(1) {
    Some(id) => id,
    None => unreachable!(),
};

pub const SET: EventTypeId = match EventTypeId::new(2) {
    Some(id) => id,
    None => unreachable!(),
};

/// Loop count of one `Increment` when not configured otherwise.
pub const DEFAULT_ITERATIONS: u64 = 1_000_000;

/// Value written by `Set`.
pub const SET_VALUE: u64 = 10;

/// Longest batch composed for this model.
pub const MAX_BATCH_LEN: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PocState {
    /// Wraps on overflow.
    pub sum: u64,
    pub iterations: u64,
}

impl PocState {
    pub fn new(iterations: u64) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidParameter("increment iterations must be at least 1".into()));
        }
        Ok(Self { sum: 0, iterations })
    }
}

pub struct PocModel;

/// `sum = sum + sum + 1`, `iterations` times.
#[inline]
pub fn increment_handler(state: &mut PocState, _event: &Event, _out: &mut HandlerOutcome) {
    let mut sum = state.sum;
    for _ in 0..state.iterations {
        sum = sum.wrapping_add(sum).wrapping_add(1);
    }
    state.sum = sum;
}

#[inline]
pub fn set_handler(state: &mut PocState, _event: &Event, _out: &mut HandlerOutcome) {
    state.sum = SET_VALUE;
}

impl Model for PocModel {
    type State = PocState;
    type Payload = ();
    const HANDLERS: &'static [HandlerFn<Self>] = &[increment_handler, set_handler];
}

crate::compose_batches!(PocModel, types = 2, max_len = 6);

/// Model definition with the same lookahead for both types.
pub fn definition(iterations: u64, lookahead: i64) -> Result<ModelDefinition<PocModel>> {
    Ok(ModelDefinition::new(LookaheadTable::uniform(2, lookahead), PocState::new(iterations)?))
}

/// Initial population of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub events: Vec<EventRequest>,
    pub lookaheads: LookaheadTable,
}

impl Workload {
    pub fn set_count(&self) -> usize {
        self.events.iter().filter(|e| e.type_id == SET).count()
    }
}

/// One event per integer time step `0..event_count`, each a `Set` with
/// probability `p_set`. Both types get lookahead `event_count`, so every
/// window admits a full-length batch.
pub fn build_workload(event_count: u64, p_set: f64, seed: u64) -> Result<Workload> {
    if !(0.0..=1.0).contains(&p_set) {
        return Err(Error::InvalidProbability(p_set));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = (0..event_count)
        .map(|t| {
            let type_id = if rng.gen_bool(p_set) { SET } else { INCREMENT };
            EventRequest::new(type_id, Timestamp(t), ())
        })
        .collect();
    let lookahead = i64::try_from(event_count).unwrap_or(i64::MAX);
    Ok(Workload { events, lookaheads: LookaheadTable::uniform(2, lookahead) })
}
