//! Analytic speedup report for the increment/set workload.

use std::fmt;

use batchsim::analytics::{
    expected_batched_cost, expected_unbatched_cost, max_speedup, monte_carlo_batched_cost, Estimate,
    SpeedupModel,
};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmaxReport {
    pub max_batch_len: u32,
    pub p_set: f64,
    pub unbatched_cost: f64,
    pub batched_cost: f64,
    pub s_max: f64,
    pub monte_carlo: Option<Estimate>,
}

/// Fails with `DegenerateProbability` unless `0 < p_set < 1`.
pub fn cmd_smax(max_batch_len: u32, p_set: f64, samples: Option<u64>, seed: u64) -> Result<SmaxReport> {
    let model = SpeedupModel::from_p_set(max_batch_len, p_set)?;
    // The speedup is checked first so a degenerate input reports its limit.
    let s_max = max_speedup(&model)?;
    Ok(SmaxReport {
        max_batch_len,
        p_set,
        unbatched_cost: expected_unbatched_cost(&model),
        batched_cost: expected_batched_cost(&model)?,
        s_max,
        monte_carlo: samples.map(|s| monte_carlo_batched_cost(&model, s, seed)).transpose()?,
    })
}

impl fmt::Display for SmaxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} p_set={}", self.max_batch_len, self.p_set)?;
        writeln!(f, "  E[T_1]: {:.6}", self.unbatched_cost)?;
        writeln!(f, "  E[T_p]: {:.6}", self.batched_cost)?;
        if let Some(mc) = self.monte_carlo {
            writeln!(
                f,
                "  E[T_p] Monte-Carlo: {:.6} +/- {:.6} ({:.2} stderr from closed form)",
                mc.mean,
                mc.stderr,
                mc.z_score(self.batched_cost)
            )?;
        }
        writeln!(f, "  s_max:  {:.6}", self.s_max)
    }
}
