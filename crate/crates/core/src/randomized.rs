//! Randomly parameterized models that schedule child events, for checking
//! batched execution against one-by-one execution.
//!
//! `RandomModel<K>` has `K` event types (1 to 4 are composed up to length 4).
//! Per-type multipliers, lookaheads, fan-outs and jitter come from a seed and
//! live in the state, so the handlers themselves are fixed at compile time.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Event, EventRequest, EventTypeId, HandlerFn, HandlerOutcome, LookaheadTable, Model, ModelDefinition,
    Timestamp,
};

/// Longest batch composed for the random models.
pub const MAX_BATCH_LEN: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomParams {
    pub lookaheads: Vec<u64>,
    pub multipliers: Vec<u64>,
    pub fanout: Vec<u32>,
    pub max_jitter: u64,
    /// Schedule children one unit short of the lookahead (a broken model).
    pub undershoot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomState {
    pub acc: u64,
    pub checksum: u64,
    pub executed: u64,
    /// Children that may still be created.
    pub budget: u64,
    pub params: Arc<RandomParams>,
}

pub struct RandomModel<const K: usize>;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn step<const K: usize>(state: &mut RandomState, event: &Event<u64>, out: &mut HandlerOutcome<u64>) {
    let kind = event.type_id.index();
    let params = &*state.params;
    state.acc = state
        .acc
        .wrapping_mul(params.multipliers[kind])
        .wrapping_add(event.payload ^ event.timestamp.0.rotate_left(17) ^ event.seq);
    state.checksum = state.checksum.rotate_left(7) ^ (event.timestamp.0 << 8 | kind as u64);
    state.executed += 1;

    for child in 0..params.fanout[kind] {
        if state.budget == 0 {
            break;
        }
        state.budget -= 1;
        let h = mix(state.acc ^ u64::from(child));
        let child_type = EventTypeId::new(1 + (h % K as u64) as u32).expect("nonzero");
        let lookahead = params.lookaheads[kind];
        let delay = if params.undershoot {
            lookahead.saturating_sub(1)
        } else {
            lookahead + (h >> 32) % (params.max_jitter + 1)
        };
        out.schedule(child_type, event.timestamp.after(delay), h >> 16);
    }
}

impl<const K: usize> Model for RandomModel<K> {
    type State = RandomState;
    type Payload = u64;
    const HANDLERS: &'static [HandlerFn<Self>] = &[step::<K> as HandlerFn<Self>; K];
}

crate::compose_batches!(RandomModel<1>, types = 1, max_len = 4);
crate::compose_batches!(RandomModel<2>, types = 2, max_len = 4);
crate::compose_batches!(RandomModel<3>, types = 3, max_len = 4);
crate::compose_batches!(RandomModel<4>, types = 4, max_len = 4);

/// A random model plus its initial population.
pub struct Scenario<const K: usize> {
    pub definition: ModelDefinition<RandomModel<K>>,
    pub initial: Vec<EventRequest<u64>>,
}

/// Draws lookaheads in `0..=4` (zero is common), fan-outs in `0..=2`, and
/// `initial_events` events on timestamps `0..16` (ties are common).
pub fn scenario<const K: usize>(seed: u64, initial_events: usize, child_budget: u64) -> Scenario<K> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lookaheads: Vec<u64> =
        (0..K).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=4) }).collect();
    let params = RandomParams {
        multipliers: (0..K).map(|_| rng.gen::<u64>() | 1).collect(),
        fanout: (0..K).map(|_| rng.gen_range(0..=2)).collect(),
        max_jitter: rng.gen_range(0..=3),
        undershoot: false,
        lookaheads,
    };
    let table: LookaheadTable = params
        .lookaheads
        .iter()
        .enumerate()
        .map(|(i, &l)| (EventTypeId::new(i as u32 + 1).expect("nonzero"), l as i64))
        .collect();
    let initial = (0..initial_events)
        .map(|_| {
            let type_id = EventTypeId::new(rng.gen_range(1..=K as u32)).expect("nonzero");
            EventRequest::new(type_id, Timestamp(rng.gen_range(0..16)), rng.gen())
        })
        .collect();
    let state = RandomState { acc: seed, checksum: 0, executed: 0, budget: child_budget, params: Arc::new(params) };
    Scenario { definition: ModelDefinition::new(table, state), initial }
}
