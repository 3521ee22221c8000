//! Minimal counting models, composed ahead of time for alphabets of one to
//! five types, so generation statistics can be taken from real tables.

use batchsim::codec::CodecConfig;
use batchsim::composer::{generate_batch_table, report_generation_stats, ComposedBatches, GenerationStats};
use batchsim::model::{validate_model, Event, HandlerFn, HandlerOutcome, LookaheadTable, Model, ModelDefinition};
use batchsim::Error;

/// Largest alphabet with a compiled table.
pub const MAX_TYPES: u32 = 5;
/// Compiled batch length of every tally model.
pub const MAX_BATCH_LEN: u32 = 5;

pub struct Tally<const K: usize>;

#[inline]
fn tally(state: &mut [u64; MAX_TYPES as usize], event: &Event, _: &mut HandlerOutcome) {
    state[event.type_id.index()] += 1;
}

impl<const K: usize> Model for Tally<K> {
    type State = [u64; MAX_TYPES as usize];
    type Payload = ();
    const HANDLERS: &'static [HandlerFn<Self>] = &[tally as HandlerFn<Self>; K];
}

batchsim::compose_batches!(Tally<1>, types = 1, max_len = 5);
batchsim::compose_batches!(Tally<2>, types = 2, max_len = 5);
batchsim::compose_batches!(Tally<3>, types = 3, max_len = 5);
batchsim::compose_batches!(Tally<4>, types = 4, max_len = 5);
batchsim::compose_batches!(Tally<5>, types = 5, max_len = 5);

fn stats_for<M>(cfg: CodecConfig) -> batchsim::Result<GenerationStats>
where
    M: ComposedBatches<State = [u64; MAX_TYPES as usize]>,
{
    let definition = ModelDefinition::<M>::new(LookaheadTable::uniform(cfg.alphabet_size(), 1), [0; 5]);
    let model = validate_model(definition)?;
    let table = generate_batch_table(&model, cfg)?;
    Ok(report_generation_stats(&table))
}

/// Generates the table for `cfg` and reports its entry counts.
pub fn composed_stats(cfg: CodecConfig) -> batchsim::Result<GenerationStats> {
    match cfg.alphabet_size() {
        1 => stats_for::<Tally<1>>(cfg),
        2 => stats_for::<Tally<2>>(cfg),
        3 => stats_for::<Tally<3>>(cfg),
        4 => stats_for::<Tally<4>>(cfg),
        5 => stats_for::<Tally<5>>(cfg),
        other => Err(Error::ConfigTooLarge(format!(
            "no composition compiled for {other} event types (supported: 1..={MAX_TYPES})"
        ))),
    }
}
