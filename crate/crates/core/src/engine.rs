//! Runtime: the future event set, conservative batch extraction with a
//! dynamic lookahead window, and dispatch of composed batches.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::codec::BatchId;
use crate::composer::{BatchTable, ComposedBatches, MAX_COMPOSED_LEN};
use crate::error::{Error, Result};
use crate::model::{Event, EventRequest, EventTypeId, HandlerOutcome, Model, Timestamp, ValidatedModel};

/// Heap entry ordered so that the earliest `(timestamp, seq)` is on top.
#[derive(Debug, Clone, Copy)]
struct Pending<P>(Event<P>);

impl<P> Pending<P> {
    #[inline]
    fn key(&self) -> (Timestamp, u64) {
        (self.0.timestamp, self.0.seq)
    }
}

impl<P> PartialEq for Pending<P> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<P> Eq for Pending<P> {}

impl<P> PartialOrd for Pending<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Pending<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key().cmp(&self.key())
    }
}

/// Pending events, extracted in `(timestamp, seq)` order.
#[derive(Debug, Clone)]
pub struct FutureEventSet<P> {
    heap: BinaryHeap<Pending<P>>,
}

impl<P> Default for FutureEventSet<P> {
    fn default() -> Self {
        Self { heap: BinaryHeap::new() }
    }
}

impl<P: Copy> FutureEventSet<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self { heap: BinaryHeap::with_capacity(capacity) }
    }

    #[inline]
    pub fn push(&mut self, event: Event<P>) {
        self.heap.push(Pending(event));
    }

    #[inline]
    pub fn pop(&mut self) -> Option<Event<P>> {
        self.heap.pop().map(|p| p.0)
    }

    #[inline]
    pub fn peek(&self) -> Option<&Event<P>> {
        self.heap.peek().map(|p| &p.0)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// How events are dispatched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Extract up to `max_batch_len` causally safe events and run the
    /// matching composed batch.
    Batched { max_batch_len: u32 },
    /// Classic one-by-one dispatch through the per-type handlers.
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Events later than this are left pending.
    pub end_time: Option<Timestamp>,
    /// Keep the executed `(timestamp, seq, type)` sequence in the report.
    pub record_trace: bool,
}

impl EngineConfig {
    pub fn batched(max_batch_len: u32) -> Self {
        Self { mode: Mode::Batched { max_batch_len }, end_time: None, record_trace: false }
    }

    pub fn baseline() -> Self {
        Self { mode: Mode::Baseline, end_time: None, record_trace: false }
    }

    pub fn with_end_time(mut self, end_time: Timestamp) -> Self {
        self.end_time = Some(end_time);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    /// Effective batch length; baseline behaves as length 1.
    pub fn max_batch_len(&self) -> u32 {
        match self.mode {
            Mode::Batched { max_batch_len } => max_batch_len,
            Mode::Baseline => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub events_executed: u64,
    pub batches_executed: u64,
    /// Time spent in the dispatch loop only.
    pub wall_time: Duration,
}

impl RunStats {
    pub fn avg_batch_len(&self) -> f64 {
        if self.batches_executed == 0 {
            0.0
        } else {
            self.events_executed as f64 / self.batches_executed as f64
        }
    }
}

/// One executed event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub timestamp: Timestamp,
    pub seq: u64,
    pub type_id: EventTypeId,
    /// Index of the batch the event ran in.
    pub batch: u64,
}

#[derive(Debug, Clone)]
pub struct RunReport<S> {
    pub state: S,
    pub stats: RunStats,
    /// Empty unless tracing was requested.
    pub trace: Vec<TraceEntry>,
}

/// Strict admission: an event exactly at `t_max` could tie with an event
/// created by the batch, so it is left for the next batch.
#[inline(always)]
pub fn window_admits(t_next: Timestamp, t_max: Timestamp) -> bool {
    t_next < t_max
}

/// A single simulation run. Not shareable across threads while running; the
/// model and table it borrows are.
pub struct Engine<'a, M: ComposedBatches> {
    model: &'a ValidatedModel<M>,
    table: &'a BatchTable<M>,
    config: EngineConfig,
    fes: FutureEventSet<M::Payload>,
    next_seq: u64,
    state: M::State,
}

impl<'a, M: ComposedBatches> Engine<'a, M> {
    pub fn new(model: &'a ValidatedModel<M>, table: &'a BatchTable<M>, config: EngineConfig) -> Result<Self> {
        let n = config.max_batch_len();
        if n == 0 {
            return Err(Error::InvalidParameter("maximum batch length must be at least 1".into()));
        }
        if n as usize > MAX_COMPOSED_LEN || n > table.cfg().max_batch_len() {
            return Err(Error::ConfigTooLarge(format!(
                "batch length {n} exceeds the table's length {}",
                table.cfg().max_batch_len()
            )));
        }
        if table.cfg().alphabet_size() != model.alphabet_size() {
            return Err(Error::AlphabetMismatch {
                composed: table.cfg().alphabet_size(),
                requested: model.alphabet_size(),
            });
        }
        Ok(Self {
            model,
            table,
            config,
            fes: FutureEventSet::new(),
            next_seq: 0,
            state: model.initial_state().clone(),
        })
    }

    pub fn state(&self) -> &M::State {
        &self.state
    }

    pub fn pending(&self) -> usize {
        self.fes.len()
    }

    /// Inserts a new event with a fresh sequence number. When `creator` is
    /// given, the request must lie at or after the creator's timestamp plus
    /// its type's lookahead.
    pub fn schedule(
        &mut self,
        request: EventRequest<M::Payload>,
        creator: Option<&Event<M::Payload>>,
    ) -> Result<()> {
        self.model.check_type(request.type_id)?;
        if let Some(creator) = creator {
            check_lookahead(self.model, &request, creator)?;
        }
        self.push(request);
        Ok(())
    }

    pub fn schedule_all<I>(&mut self, requests: I) -> Result<()>
    where
        I: IntoIterator<Item = EventRequest<M::Payload>>,
    {
        requests.into_iter().try_for_each(|r| self.schedule(r, None))
    }

    #[inline]
    fn push(&mut self, request: EventRequest<M::Payload>) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.fes.push(Event {
            type_id: request.type_id,
            timestamp: request.timestamp,
            seq,
            payload: request.payload,
        });
    }

    /// Pops the earliest event, then keeps popping while the batch is shorter
    /// than the configured length and the next event lies strictly before
    /// `t_max`, the running minimum of `t + lookahead` over the batch.
    pub fn extract_batch(&mut self) -> Result<(Vec<Event<M::Payload>>, BatchId)> {
        let mut events = Vec::with_capacity(self.config.max_batch_len() as usize);
        let id = self.extract_into(&mut events)?;
        Ok((events, id))
    }

    #[inline]
    fn extract_into(&mut self, batch: &mut Vec<Event<M::Payload>>) -> Result<BatchId> {
        let n = self.config.max_batch_len() as usize;
        let base = self.table.cfg().base();
        let lookaheads = self.model.lookaheads();
        let end_time = self.config.end_time.unwrap_or(Timestamp(u64::MAX));

        let first = self.fes.pop().ok_or(Error::EmptyQueue)?;
        let mut t_max = first.timestamp.after(lookaheads[first.type_id.index()]);
        let mut id = u64::from(first.type_id.get());
        let mut weight = base;
        batch.push(first);

        while batch.len() < n {
            match self.fes.peek() {
                Some(next) if window_admits(next.timestamp, t_max) && next.timestamp <= end_time => {}
                _ => break,
            }
            let Some(event) = self.fes.pop() else { break };
            t_max = t_max.min(event.timestamp.after(lookaheads[event.type_id.index()]));
            id += u64::from(event.type_id.get()) * weight;
            weight *= base;
            batch.push(event);
        }
        Ok(BatchId(id))
    }

    /// Runs until the future event set is empty or only events after the end
    /// time remain.
    pub fn run(mut self) -> Result<RunReport<M::State>> {
        let mut trace = Vec::new();
        let started = Instant::now();
        let (events_executed, batches_executed) = match self.config.mode {
            Mode::Baseline => self.run_baseline(&mut trace)?,
            Mode::Batched { .. } => self.run_batched(&mut trace)?,
        };
        let wall_time = started.elapsed();
        Ok(RunReport {
            state: self.state,
            stats: RunStats { events_executed, batches_executed, wall_time },
            trace,
        })
    }

    #[inline]
    fn next_is_due(&self) -> bool {
        match (self.fes.peek(), self.config.end_time) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(next), Some(end)) => next.timestamp <= end,
        }
    }

    fn run_batched(&mut self, trace: &mut Vec<TraceEntry>) -> Result<(u64, u64)> {
        let mut batch = Vec::with_capacity(self.config.max_batch_len() as usize);
        let mut out = HandlerOutcome::new();
        let (mut events, mut batches) = (0u64, 0u64);
        while self.next_is_due() {
            batch.clear();
            let id = self.extract_into(&mut batch)?;
            let composed = self.table.get(id).ok_or(Error::MissingBatchEntry(id.0))?;
            composed(&mut self.state, &batch, &mut out);

            if self.config.record_trace {
                trace.extend(batch.iter().map(|e| TraceEntry {
                    timestamp: e.timestamp,
                    seq: e.seq,
                    type_id: e.type_id,
                    batch: batches,
                }));
            }
            events += batch.len() as u64;
            batches += 1;
            self.flush(&mut out, &batch)?;
        }
        Ok((events, batches))
    }

    fn run_baseline(&mut self, trace: &mut Vec<TraceEntry>) -> Result<(u64, u64)> {
        let mut out = HandlerOutcome::new();
        let mut events = 0u64;
        while self.next_is_due() {
            let Some(event) = self.fes.pop() else { break };
            let handler = M::HANDLERS[event.type_id.index()];
            handler(&mut self.state, &event, &mut out);

            if self.config.record_trace {
                trace.push(TraceEntry {
                    timestamp: event.timestamp,
                    seq: event.seq,
                    type_id: event.type_id,
                    batch: events,
                });
            }
            events += 1;
            self.flush(&mut out, std::slice::from_ref(&event))?;
        }
        Ok((events, events))
    }

    /// Inserts the requests buffered during one batch, in creation order.
    #[inline]
    fn flush(&mut self, out: &mut HandlerOutcome<M::Payload>, batch: &[Event<M::Payload>]) -> Result<()> {
        if out.is_empty() {
            return Ok(());
        }
        let model = self.model;
        for created in out.drain() {
            let creator = batch.get(created.creator).ok_or_else(|| {
                Error::InvalidParameter(format!("request names batch position {}", created.creator))
            })?;
            model.check_type(created.request.type_id)?;
            check_lookahead(model, &created.request, creator)?;
            self.push(created.request);
        }
        Ok(())
    }
}

fn check_lookahead<M: Model>(
    model: &ValidatedModel<M>,
    request: &EventRequest<M::Payload>,
    creator: &Event<M::Payload>,
) -> Result<()> {
    let lookahead = model.lookahead(creator.type_id);
    if request.timestamp < creator.timestamp.after(lookahead) {
        return Err(Error::LookaheadViolation {
            child_type: request.type_id,
            child_time: request.timestamp,
            creator_type: creator.type_id,
            creator_time: creator.timestamp,
            lookahead,
        });
    }
    Ok(())
}

/// Schedules `initial` and runs the engine to completion.
pub fn run<M, I>(
    model: &ValidatedModel<M>,
    table: &BatchTable<M>,
    config: EngineConfig,
    initial: I,
) -> Result<RunReport<M::State>>
where
    M: ComposedBatches,
    I: IntoIterator<Item = EventRequest<M::Payload>>,
{
    let mut engine = Engine::new(model, table, config)?;
    engine.schedule_all(initial)?;
    engine.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::CodecConfig;
    use crate::composer::generate_batch_table;
    use crate::model::{validate_model, HandlerFn, ModelDefinition};

    /// Three types; type 3 schedules a type-1 child at a payload-given offset.
    struct Spawner;

    fn note(state: &mut Vec<u64>, event: &Event<u64>, _: &mut HandlerOutcome<u64>) {
        state.push(event.timestamp.0);
    }

    fn spawn(state: &mut Vec<u64>, event: &Event<u64>, out: &mut HandlerOutcome<u64>) {
        state.push(event.timestamp.0);
        out.schedule(ty(1), Timestamp(event.timestamp.0 + event.payload), 0);
    }

    impl Model for Spawner {
        type State = Vec<u64>;
        type Payload = u64;
        const HANDLERS: &'static [HandlerFn<Self>] = &[note, note, spawn];
    }

    crate::compose_batches!(Spawner, types = 3, max_len = 4);

    fn ty(v: u32) -> EventTypeId {
        EventTypeId::new(v).unwrap()
    }

    fn model(lookaheads: [i64; 3]) -> ValidatedModel<Spawner> {
        let table = lookaheads.iter().enumerate().map(|(i, &l)| (ty(i as u32 + 1), l)).collect();
        validate_model(ModelDefinition::new(table, Vec::new())).unwrap()
    }

    fn table(model: &ValidatedModel<Spawner>) -> BatchTable<Spawner> {
        generate_batch_table(model, CodecConfig::new(3, 4).unwrap()).unwrap()
    }

    fn req(type_id: u32, t: u64) -> EventRequest<u64> {
        EventRequest::new(ty(type_id), Timestamp(t), 0)
    }

    fn creator(t: u64) -> Event<u64> {
        Event { type_id: ty(1), timestamp: Timestamp(t), seq: 99, payload: 0 }
    }

    #[test]
    fn window_admission_is_strict() {
        assert!(!window_admits(Timestamp(4), Timestamp(4)));
        assert!(window_admits(Timestamp(3), Timestamp(4)));
        assert!(!window_admits(Timestamp(5), Timestamp(4)));
    }

    #[test]
    fn fes_breaks_ties_by_sequence() {
        let mut fes = FutureEventSet::new();
        for (t, seq) in [(5, 0), (1, 1), (5, 2), (1, 3)] {
            fes.push(Event { type_id: ty(1), timestamp: Timestamp(t), seq, payload: () });
        }
        let order: Vec<_> = std::iter::from_fn(|| fes.pop()).map(|e| (e.timestamp.0, e.seq)).collect();
        assert_eq!(order, vec![(1, 1), (1, 3), (5, 0), (5, 2)]);
    }

    #[test]
    fn schedule_enforces_lookahead() {
        let m = model([5, 5, 5]);
        let t = table(&m);
        let mut engine = Engine::new(&m, &t, EngineConfig::batched(4)).unwrap();
        engine.schedule(req(1, 0), None).unwrap();
        engine.schedule(req(1, 15), Some(&creator(10))).unwrap();
        let err = engine.schedule(req(1, 12), Some(&creator(10))).unwrap_err();
        assert!(matches!(err, Error::LookaheadViolation { lookahead: 5, .. }));
        assert_eq!(engine.pending(), 2);
    }

    #[test]
    fn schedule_rejects_unknown_types() {
        let m = model([1, 1, 1]);
        let t = table(&m);
        let mut engine = Engine::new(&m, &t, EngineConfig::baseline()).unwrap();
        assert_eq!(
            engine.schedule(req(4, 0), None).unwrap_err(),
            Error::InvalidTypeId { type_id: 4, alphabet: 3 }
        );
    }

    #[test]
    fn running_minimum_bounds_the_batch() {
        // (t=0, l=4), (t=2, l=3), (t=3, l=10), then t=5: t_max stays at 4.
        let m = model([4, 3, 10]);
        let t = table(&m);
        let mut engine = Engine::new(&m, &t, EngineConfig::batched(4)).unwrap();
        engine.schedule_all([req(1, 0), req(2, 2), req(3, 3), req(1, 5)]).unwrap();
        let (events, id) = engine.extract_batch().unwrap();
        let times: Vec<_> = events.iter().map(|e| e.timestamp.0).collect();
        assert_eq!(times, vec![0, 2, 3]);
        assert_eq!(id, CodecConfig::new(3, 4).unwrap().encode(&[ty(1), ty(2), ty(3)]).unwrap());
        assert_eq!(engine.pending(), 1);
    }

    #[test]
    fn zero_lookahead_forces_singletons() {
        let m = model([0, 9, 9]);
        let t = table(&m);
        let mut engine = Engine::new(&m, &t, EngineConfig::batched(2)).unwrap();
        engine.schedule_all([req(1, 0), req(2, 1)]).unwrap();
        let (events, id) = engine.extract_batch().unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(id, BatchId(1));
    }

    #[test]
    fn singleton_batch_id_is_its_type() {
        let m = model([9, 9, 9]);
        let t = table(&m);
        let mut engine = Engine::new(&m, &t, EngineConfig::batched(4)).unwrap();
        engine.schedule(req(2, 7), None).unwrap();
        let (events, id) = engine.extract_batch().unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(id, BatchId(2));
        assert_eq!(engine.extract_batch().unwrap_err(), Error::EmptyQueue);
    }

    #[test]
    fn empty_run_returns_initial_state() {
        let m = model([1, 1, 1]);
        let t = table(&m);
        let report = run(&m, &t, EngineConfig::batched(3), []).unwrap();
        assert!(report.state.is_empty());
        assert_eq!(report.stats.events_executed, 0);
        assert_eq!(report.stats.avg_batch_len(), 0.0);
    }

    #[test]
    fn children_are_inserted_after_the_batch() {
        let m = model([1, 1, 3]);
        let t = table(&m);
        let initial = [EventRequest::new(ty(3), Timestamp(0), 3), req(1, 1), req(2, 2)];
        let batched = run(&m, &t, EngineConfig::batched(4).with_trace(), initial).unwrap();
        let baseline = run(&m, &t, EngineConfig::baseline().with_trace(), initial).unwrap();
        assert_eq!(batched.state, vec![0, 1, 2, 3]);
        assert_eq!(batched.state, baseline.state);
        let key = |r: &RunReport<Vec<u64>>| -> Vec<_> {
            r.trace.iter().map(|e| (e.timestamp, e.seq, e.type_id)).collect()
        };
        assert_eq!(key(&batched), key(&baseline));
        assert!(batched.stats.batches_executed < baseline.stats.batches_executed);
    }

    #[test]
    fn child_below_lookahead_aborts_the_run() {
        let m = model([1, 1, 3]);
        let t = table(&m);
        for config in [EngineConfig::batched(4), EngineConfig::baseline()] {
            let err = run(&m, &t, config, [EventRequest::new(ty(3), Timestamp(0), 2)]).unwrap_err();
            assert!(matches!(err, Error::LookaheadViolation { .. }), "{config:?}");
        }
    }

    #[test]
    fn end_time_leaves_later_events_pending() {
        let m = model([100, 100, 100]);
        let t = table(&m);
        let config = EngineConfig::batched(4).with_end_time(Timestamp(2));
        let report = run(&m, &t, config, (0..6).map(|t| req(1, t))).unwrap();
        assert_eq!(report.state, vec![0, 1, 2]);
    }

    #[test]
    fn engine_rejects_lengths_beyond_the_table() {
        let m = model([1, 1, 1]);
        let t = generate_batch_table(&m, CodecConfig::new(3, 2).unwrap()).unwrap();
        assert!(matches!(Engine::new(&m, &t, EngineConfig::batched(3)), Err(Error::ConfigTooLarge(_))));
        assert!(Engine::new(&m, &t, EngineConfig::batched(0)).is_err());
    }
}
