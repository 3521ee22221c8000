//! Ahead-of-runtime batch composition.
//!
//! [`compose_batches!`](crate::compose_batches) enumerates every id in
//! `0..=B` at compile time and instantiates [`Composed<M, ID>`] for each. The
//! handler sequence of an instantiation is decoded in constant context from
//! the model's constant handler array, so its `run` is a straight-line body of
//! direct calls that the optimizer inlines and treats as one procedure. Dead
//! stores and loops whose results are overwritten by a later event in the
//! same batch disappear there, which is the whole point of batching.
//!
//! [`generate_batch_table`] then exposes the prefix of the compiled table that
//! a runtime [`CodecConfig`] needs.

use std::fmt;
use std::marker::PhantomData;

use crate::codec::{BatchId, CodecConfig};
use crate::error::{Error, Result};
use crate::model::{Event, HandlerFn, HandlerOutcome, Model, ValidatedModel};

/// Longest batch a single composed procedure can hold.
pub const MAX_COMPOSED_LEN: usize = 8;

/// Default ceiling on the number of table entries.
pub const DEFAULT_GENERATION_CAP: u64 = 100_000;

/// A composed batch: runs its constituent handlers in order, each on the event
/// at its own position, and accumulates their new-event requests.
pub type BatchFn<M> = fn(
    &mut <M as Model>::State,
    &[Event<<M as Model>::Payload>],
    &mut HandlerOutcome<<M as Model>::Payload>,
);

/// Implemented by `compose_batches!` for a model: the compiled table of
/// composed batches for every id up to the compiled maximum batch length.
pub trait ComposedBatches: Model {
    const MAX_BATCH_LEN: u32;
    const ENTRIES: &'static [BatchFn<Self>];
}

/// One composed batch, identified at compile time by `ID`.
pub struct Composed<M, const ID: u64>(PhantomData<M>);

impl<M: Model, const ID: u64> Composed<M, ID> {
    /// Handlers in execution order; trailing slots are `None`.
    pub const STEPS: [Option<HandlerFn<M>>; MAX_COMPOSED_LEN] = plan::<M>(ID);

    /// Number of events the batch consumes.
    pub const LEN: usize = plan_len(&Self::STEPS);

    pub fn run(
        state: &mut M::State,
        events: &[Event<M::Payload>],
        out: &mut HandlerOutcome<M::Payload>,
    ) {
        debug_assert_eq!(events.len(), Self::LEN, "batch {ID} applied to {} events", events.len());
        let events = &events[..Self::LEN];
        macro_rules! steps {
            ($($k:literal)*) => {$(
                if let Some(handler) = Self::STEPS[$k] {
                    out.set_creator($k);
                    handler(state, &events[$k], out);
                }
            )*};
        }
        steps!(0 1 2 3 4 5 6 7);
    }
}

/// Digit extraction in constant context: least significant digit first,
/// "no event" digits skipped.
const fn plan<M: Model>(id: u64) -> [Option<HandlerFn<M>>; MAX_COMPOSED_LEN] {
    let base = M::HANDLERS.len() as u64 + 1;
    let mut steps: [Option<HandlerFn<M>>; MAX_COMPOSED_LEN] = [None; MAX_COMPOSED_LEN];
    let mut len = 0;
    let mut rest = id;
    while rest > 0 {
        let digit = rest % base;
        if digit > 0 {
            assert!(len < MAX_COMPOSED_LEN, "batch id decodes to more events than a composed batch holds");
            steps[len] = Some(M::HANDLERS[(digit - 1) as usize]);
            len += 1;
        }
        rest /= base;
    }
    steps
}

const fn plan_len<F: Copy>(steps: &[Option<F>; MAX_COMPOSED_LEN]) -> usize {
    let mut len = 0;
    while len < MAX_COMPOSED_LEN && steps[len].is_some() {
        len += 1;
    }
    len
}

/// Limits applied while generating a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationOptions {
    /// Maximum number of entries, including the empty batch.
    pub cap: u64,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_GENERATION_CAP }
    }
}

/// Immutable map from batch id to composed batch for ids `0..=B`.
pub struct BatchTable<M: ComposedBatches> {
    entries: &'static [BatchFn<M>],
    cfg: CodecConfig,
}

impl<M: ComposedBatches> Clone for BatchTable<M> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<M: ComposedBatches> Copy for BatchTable<M> {}

impl<M: ComposedBatches> fmt::Debug for BatchTable<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BatchTable").field("cfg", &self.cfg).field("entries", &self.entries.len()).finish()
    }
}

impl<M: ComposedBatches> BatchTable<M> {
    pub fn cfg(&self) -> &CodecConfig {
        &self.cfg
    }

    /// Number of entries, `B + 1`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn get(&self, id: BatchId) -> Option<BatchFn<M>> {
        self.entries.get(id.0 as usize).copied()
    }

    /// Runs batch `id` on `events`, which must match the decoded sequence in
    /// length and order.
    pub fn execute(
        &self,
        id: BatchId,
        state: &mut M::State,
        events: &[Event<M::Payload>],
        out: &mut HandlerOutcome<M::Payload>,
    ) -> Result<()> {
        let batch = self.get(id).ok_or(Error::MissingBatchEntry(id.0))?;
        batch(state, events, out);
        Ok(())
    }
}

/// Selects the composed batches for `cfg` from the model's compiled table.
pub fn generate_batch_table<M: ComposedBatches>(
    model: &ValidatedModel<M>,
    cfg: CodecConfig,
) -> Result<BatchTable<M>> {
    generate_batch_table_with(model, cfg, GenerationOptions::default())
}

pub fn generate_batch_table_with<M: ComposedBatches>(
    model: &ValidatedModel<M>,
    cfg: CodecConfig,
    options: GenerationOptions,
) -> Result<BatchTable<M>> {
    if cfg.alphabet_size() != model.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            composed: model.alphabet_size(),
            requested: cfg.alphabet_size(),
        });
    }
    if cfg.max_batch_len() > M::MAX_BATCH_LEN {
        return Err(Error::ConfigTooLarge(format!(
            "batch length {} exceeds the compiled composition length {}",
            cfg.max_batch_len(),
            M::MAX_BATCH_LEN
        )));
    }
    let entries = cfg.total_batch_count() + 1;
    if entries > options.cap {
        return Err(Error::ConfigTooLarge(format!(
            "{entries} batches exceed the generation cap of {}",
            options.cap
        )));
    }
    let entries = M::ENTRIES.get(..entries as usize).ok_or_else(|| {
        Error::ConfigTooLarge(format!("compiled table holds only {} entries", M::ENTRIES.len()))
    })?;
    Ok(BatchTable { entries, cfg })
}

/// Entry counts of a generated table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationStats {
    /// Non-empty batches, `B`.
    pub total: u64,
    pub reachable: u64,
    pub redundant: u64,
}

/// Classifies every non-empty entry of `table` as reachable or redundant.
pub fn report_generation_stats<M: ComposedBatches>(table: &BatchTable<M>) -> GenerationStats {
    let cfg = table.cfg();
    let total = table.len() as u64 - 1;
    let reachable = (1..=total)
        .filter(|&id| cfg.is_reachable(BatchId(id)).unwrap_or(false))
        .count() as u64;
    GenerationStats { total, reachable, redundant: total - reachable }
}
