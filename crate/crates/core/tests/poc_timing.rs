//! Timing properties of the proof-of-concept model. Kept in a single test so
//! measurements never overlap with each other.

use std::hint::black_box;
use std::time::{Duration, Instant};

use batchsim::codec::CodecConfig;
use batchsim::composer::{BatchFn, ComposedBatches};
use batchsim::model::{Event, HandlerOutcome, Timestamp};
use batchsim::poc_model::{PocModel, PocState, INCREMENT, SET};

fn per_call(batch: BatchFn<PocModel>, events: &[Event], iterations: u64, calls: u32) -> Duration {
    let mut state = PocState { sum: 0, iterations };
    let mut out = HandlerOutcome::new();
    // Best of five repetitions.
    (0..5)
        .map(|_| {
            let started = Instant::now();
            for _ in 0..calls {
                batch(black_box(&mut state), black_box(events), &mut out);
            }
            started.elapsed() / calls
        })
        .min()
        .unwrap()
}

#[test]
fn increment_is_linear_and_dead_increments_vanish() {
    let cfg = CodecConfig::new(2, 2).unwrap();
    let event = |type_id| Event { type_id, timestamp: Timestamp(0), seq: 0, payload: () };
    let increment = PocModel::ENTRIES[cfg.encode(&[INCREMENT]).unwrap().0 as usize];
    let increment_set = PocModel::ENTRIES[cfg.encode(&[INCREMENT, SET]).unwrap().0 as usize];

    let small = per_call(increment, &[event(INCREMENT)], 10_000, 2_000);
    let large = per_call(increment, &[event(INCREMENT)], 100_000, 200);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    assert!((7.0..=13.0).contains(&ratio), "10x iterations cost {ratio:.2}x");

    let alive = per_call(increment, &[event(INCREMENT)], 1_000_000, 20);
    let dead = per_call(increment_set, &[event(INCREMENT), event(SET)], 1_000_000, 20_000);
    assert!(
        dead.as_secs_f64() * 100.0 <= alive.as_secs_f64(),
        "[Increment, Set] {dead:?} vs [Increment] {alive:?}"
    );
}
