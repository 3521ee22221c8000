//! Batch-count report: formula values, optionally cross-checked against a
//! table generated from a compiled composition.

use std::fmt;

use batchsim::codec::CodecConfig;
use batchsim::composer::GenerationStats;

use crate::error::{BenchError, Result};
use crate::tally::composed_stats;

#[derive(Debug, Clone, PartialEq)]
pub struct CountsReport {
    pub types: u32,
    pub max_batch_len: u32,
    pub total: u64,
    pub reachable: u64,
    pub redundant: u64,
    pub fraction: f64,
    /// Counts taken from a generated table, when requested.
    pub composed: Option<GenerationStats>,
}

pub fn cmd_counts(types: u32, max_batch_len: u32, composed: bool) -> Result<CountsReport> {
    let cfg = CodecConfig::new(types, max_batch_len)?;
    let redundancy = cfg.redundant_batch_count();
    let report = CountsReport {
        types,
        max_batch_len,
        total: cfg.total_batch_count(),
        reachable: cfg.reachable_batch_count(),
        redundant: redundancy.redundant,
        fraction: redundancy.fraction,
        composed: composed.then(|| composed_stats(cfg)).transpose()?,
    };
    if let Some(stats) = report.composed {
        let expected = (report.total, report.reachable, report.redundant);
        let actual = (stats.total, stats.reachable, stats.redundant);
        if expected != actual {
            return Err(BenchError::CountMismatch(format!(
                "formulas give (total, reachable, redundant) = {expected:?}, table gives {actual:?}"
            )));
        }
    }
    Ok(report)
}

impl fmt::Display for CountsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "types={} n={}", self.types, self.max_batch_len)?;
        writeln!(f, "  total:     {}", self.total)?;
        writeln!(f, "  reachable: {}", self.reachable)?;
        writeln!(f, "  redundant: {} ({:.2}%)", self.redundant, self.fraction * 100.0)?;
        if let Some(stats) = self.composed {
            writeln!(
                f,
                "  composed table: total {}, reachable {}, redundant {} (matches)",
                stats.total, stats.reachable, stats.redundant
            )?;
        }
        Ok(())
    }
}
