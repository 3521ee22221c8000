//! Speedup sanity checks on short runs, kept in one test so they never time
//! concurrently.

use batchsim_bench::{cmd_run, BenchConfig, RunMode};

#[test]
fn speedup_tracks_batch_length() {
    let base = BenchConfig {
        p_set: 0.5,
        events: 2_000,
        iterations: 100_000,
        runs: 3,
        seed: 42,
        mode: RunMode::Both,
        warmup: true,
        max_batch_len: 1,
    };
    // A batch of one gives the baseline back.
    let single = cmd_run(&base).unwrap().mean_speedup().unwrap();
    assert!((0.8..=1.25).contains(&single), "n=1 speedup {single}");

    let wide = cmd_run(&BenchConfig { max_batch_len: 6, ..base }).unwrap();
    let speedup = wide.mean_speedup().unwrap();
    assert!(speedup > 1.5, "n=6 speedup {speedup}");
    assert!(speedup <= wide.s_max.value * 1.2, "n=6 speedup {speedup} far above s_max {}", wide.s_max.value);
}
