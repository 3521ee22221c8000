//! Domain types shared by the codec, composer and engine: event types,
//! timestamps, events, handler outcomes, lookahead tables and the model
//! contract itself.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroU32;

use crate::error::{Error, Result};

/// A registered event type, numbered from 1. Digit 0 of the batch-id number
/// system is the reserved "no event" slot and never names a handler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventTypeId(NonZeroU32);

impl EventTypeId {
    pub const fn new(value: u32) -> Option<Self> {
        match NonZeroU32::new(value) {
            Some(v) => Some(Self(v)),
            None => None,
        }
    }

    pub const fn get(self) -> u32 {
        self.0.get()
    }

    /// Position of this type's handler in [`Model::HANDLERS`].
    pub const fn index(self) -> usize {
        (self.0.get() - 1) as usize
    }
}

impl fmt::Display for EventTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Simulation time in integer model units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub const ZERO: Timestamp = Timestamp(0);

    /// `self + delta`, saturating at the end of representable time.
    #[inline]
    pub const fn after(self, delta: u64) -> Timestamp {
        Timestamp(self.0.saturating_add(delta))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An entry of the future event set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event<P = ()> {
    pub type_id: EventTypeId,
    pub timestamp: Timestamp,
    /// Creation counter; `(timestamp, seq)` is unique within one engine.
    pub seq: u64,
    pub payload: P,
}

/// A request to schedule a new event, as produced by handlers or supplied as
/// part of the initial population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRequest<P = ()> {
    pub type_id: EventTypeId,
    pub timestamp: Timestamp,
    pub payload: P,
}

impl<P> EventRequest<P> {
    pub fn new(type_id: EventTypeId, timestamp: Timestamp, payload: P) -> Self {
        Self { type_id, timestamp, payload }
    }
}

/// A scheduling request tagged with the batch position of the event that
/// created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CreatedRequest<P> {
    pub creator: usize,
    pub request: EventRequest<P>,
}

/// New-event requests accumulated while running one handler or one composed
/// batch. Requests are kept in creation order and inserted into the future
/// event set only after the batch completes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerOutcome<P = ()> {
    requests: Vec<CreatedRequest<P>>,
    creator: usize,
}

impl<P> Default for HandlerOutcome<P> {
    fn default() -> Self {
        Self { requests: Vec::new(), creator: 0 }
    }
}

impl<P> HandlerOutcome<P> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Request a new event. The timestamp must respect the creating event's
    /// lookahead; the engine rejects it otherwise.
    #[inline]
    pub fn schedule(&mut self, type_id: EventTypeId, timestamp: Timestamp, payload: P) {
        self.requests.push(CreatedRequest {
            creator: self.creator,
            request: EventRequest { type_id, timestamp, payload },
        });
    }

    /// Marks which batch position subsequent requests belong to.
    #[inline(always)]
    pub fn set_creator(&mut self, position: usize) {
        self.creator = position;
    }

    pub fn requests(&self) -> &[CreatedRequest<P>] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn clear(&mut self) {
        self.requests.clear();
        self.creator = 0;
    }

    pub(crate) fn drain(&mut self) -> std::vec::Drain<'_, CreatedRequest<P>> {
        self.creator = 0;
        self.requests.drain(..)
    }
}

/// Signature shared by every event handler of a model.
pub type HandlerFn<M> = fn(
    &mut <M as Model>::State,
    &Event<<M as Model>::Payload>,
    &mut HandlerOutcome<<M as Model>::Payload>,
);

/// A simulation model: its state type, payload type and the constant array of
/// event handlers. The handler at index `i` serves event type `i + 1`.
///
/// Handlers are plain functions known at compile time. The composer builds
/// each batch from this array in constant context, so a handler body must not
/// hide its work behind dynamic dispatch if cross-event optimization is
/// wanted. Mark handlers `#[inline]` when batches are composed in another
/// crate; otherwise their bodies are not available for inlining there.
pub trait Model: Sized + 'static {
    type State: Clone;
    type Payload: Copy + Default + PartialEq + fmt::Debug;

    const HANDLERS: &'static [HandlerFn<Self>];

    fn alphabet_size() -> u32 {
        Self::HANDLERS.len() as u32
    }

    fn handler_for(type_id: EventTypeId) -> Option<HandlerFn<Self>> {
        Self::HANDLERS.get(type_id.index()).copied()
    }
}

/// Declared per-type lookaheads: the minimum delta between an event's
/// timestamp and the timestamp of any event it creates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookaheadTable {
    entries: BTreeMap<EventTypeId, i64>,
}

impl LookaheadTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same lookahead for types `1..=alphabet`.
    pub fn uniform(alphabet: u32, delta: i64) -> Self {
        (1..=alphabet)
            .filter_map(EventTypeId::new)
            .fold(Self::new(), |table, id| table.with(id, delta))
    }

    pub fn with(mut self, type_id: EventTypeId, delta: i64) -> Self {
        self.set(type_id, delta);
        self
    }

    pub fn set(&mut self, type_id: EventTypeId, delta: i64) {
        self.entries.insert(type_id, delta);
    }

    pub fn get(&self, type_id: EventTypeId) -> Option<i64> {
        self.entries.get(&type_id).copied()
    }
}

impl FromIterator<(EventTypeId, i64)> for LookaheadTable {
    fn from_iter<I: IntoIterator<Item = (EventTypeId, i64)>>(iter: I) -> Self {
        Self { entries: iter.into_iter().collect() }
    }
}

/// A model as submitted by the modeler, before validation.
pub struct ModelDefinition<M: Model> {
    pub lookaheads: LookaheadTable,
    pub initial_state: M::State,
}

impl<M: Model> ModelDefinition<M> {
    pub fn new(lookaheads: LookaheadTable, initial_state: M::State) -> Self {
        Self { lookaheads, initial_state }
    }
}

impl<M: Model> Clone for ModelDefinition<M> {
    fn clone(&self) -> Self {
        Self { lookaheads: self.lookaheads.clone(), initial_state: self.initial_state.clone() }
    }
}

impl<M: Model> fmt::Debug for ModelDefinition<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelDefinition")
            .field("alphabet", &M::alphabet_size())
            .field("lookaheads", &self.lookaheads)
            .finish_non_exhaustive()
    }
}

/// A model whose lookahead table covers every registered type with a
/// non-negative delta.
pub struct ValidatedModel<M: Model> {
    lookaheads: Box<[u64]>,
    initial_state: M::State,
}

impl<M: Model> ValidatedModel<M> {
    pub fn alphabet_size(&self) -> u32 {
        self.lookaheads.len() as u32
    }

    /// Lookahead of `type_id`, which must belong to the model.
    #[inline]
    pub fn lookahead(&self, type_id: EventTypeId) -> u64 {
        self.lookaheads[type_id.index()]
    }

    /// Dense lookahead array, indexed by [`EventTypeId::index`].
    pub fn lookaheads(&self) -> &[u64] {
        &self.lookaheads
    }

    pub fn initial_state(&self) -> &M::State {
        &self.initial_state
    }

    pub fn check_type(&self, type_id: EventTypeId) -> Result<()> {
        if type_id.index() < self.lookaheads.len() {
            Ok(())
        } else {
            Err(Error::InvalidTypeId { type_id: type_id.get(), alphabet: self.alphabet_size() })
        }
    }
}

impl<M: Model> Clone for ValidatedModel<M> {
    fn clone(&self) -> Self {
        Self { lookaheads: self.lookaheads.clone(), initial_state: self.initial_state.clone() }
    }
}

impl<M: Model> fmt::Debug for ValidatedModel<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValidatedModel").field("lookaheads", &self.lookaheads).finish_non_exhaustive()
    }
}

/// Checks that the model has at least one handler and a non-negative
/// lookahead for each of them.
pub fn validate_model<M: Model>(model: ModelDefinition<M>) -> Result<ValidatedModel<M>> {
    let alphabet = M::alphabet_size();
    if alphabet == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let lookaheads = (1..=alphabet)
        .filter_map(EventTypeId::new)
        .map(|id| match model.lookaheads.get(id) {
            None => Err(Error::MissingLookahead(id)),
            Some(delta) if delta < 0 => Err(Error::NegativeLookahead(id, delta)),
            Some(delta) => Ok(delta as u64),
        })
        .collect::<Result<Box<[u64]>>>()?;
    Ok(ValidatedModel { lookaheads, initial_state: model.initial_state })
}
