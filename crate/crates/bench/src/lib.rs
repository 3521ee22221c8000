//! Benchmark harness for `batchsim`: timed batched-versus-baseline runs of
//! the proof-of-concept model, batch-count reports and the analytic speedup
//! bound. The `batchsim` binary is a thin command-line layer over this crate.

pub mod counts;
pub mod error;
pub mod run;
pub mod smax;
pub mod tally;

pub use counts::{cmd_counts, CountsReport};
pub use error::{BenchError, Result};
pub use run::{cmd_run, speedup_bound, write_csv, BenchConfig, BenchRecord, RunMode, RunSummary, SpeedupBound, CSV_HEADER};
pub use smax::{cmd_smax, SmaxReport};
