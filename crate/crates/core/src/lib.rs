//! Discrete-event simulation with ahead-of-runtime event batching.
//!
//! Every sequence of up to `n` event handlers is composed at compile time into
//! its own procedure ([`composer`]), identified by a mixed-radix batch id
//! ([`codec`]). At runtime the [`engine`] extracts causally safe batches with
//! a dynamic lookahead window and dispatches the matching composed procedure,
//! so optimizations such as dead-store and dead-loop elimination can span
//! event boundaries.
//!
//! ```
//! use batchsim::codec::CodecConfig;
//! use batchsim::composer::generate_batch_table;
//! use batchsim::engine::{run, EngineConfig};
//! use batchsim::model::validate_model;
//! use batchsim::poc_model::{build_workload, definition};
//!
//! let workload = build_workload(100, 0.5, 1).unwrap();
//! let model = validate_model(definition(1_000, 100).unwrap()).unwrap();
//! let table = generate_batch_table(&model, CodecConfig::new(2, 4).unwrap()).unwrap();
//! let batched = run(&model, &table, EngineConfig::batched(4), workload.events.clone()).unwrap();
//! let baseline = run(&model, &table, EngineConfig::baseline(), workload.events).unwrap();
//! assert_eq!(batched.state, baseline.state);
//! ```

pub mod analytics;
pub mod codec;
pub mod composer;
pub mod engine;
pub mod error;
pub mod model;
pub mod poc_model;
pub mod randomized;

pub use error::{Error, Result};

/// Composes every batch of up to `max_len` handlers of a model at compile
/// time and implements [`composer::ComposedBatches`] for it.
///
/// ```
/// use batchsim::composer::ComposedBatches;
/// use batchsim::model::{Event, HandlerFn, HandlerOutcome, Model};
///
/// pub struct Counter;
///
/// #[inline]
/// fn tick(state: &mut u64, _event: &Event, _out: &mut HandlerOutcome) {
///     *state += 1;
/// }
///
/// impl Model for Counter {
///     type State = u64;
///     type Payload = ();
///     const HANDLERS: &'static [HandlerFn<Self>] = &[tick];
/// }
///
/// batchsim::compose_batches!(Counter, types = 1, max_len = 4);
///
/// assert_eq!(Counter::ENTRIES.len(), 1 + 2 + 4 + 8 + 16);
/// ```
///
/// `types` must equal the length of the model's handler array (checked at
/// compile time). An optional `cap = N` bounds the number of generated
/// entries (default 100 000).
#[macro_export]
macro_rules! compose_batches {
    ($($input:tt)*) => {
        $crate::__private::compose_batches_impl!($crate; $($input)*);
    };
}

#[doc(hidden)]
pub mod __private {
    pub use batchsim_macros::compose_batches_impl;
}
