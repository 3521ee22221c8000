//! Expected-cost model for batches of costly "increment" and cheap "set"
//! events.
//!
//! Within one batch a costly event's work survives only if no cheap event
//! follows it, since the cheap event overwrites everything the costly one
//! computed. With `n` i.i.d. events per batch and probability `p_I` of a
//! costly event:
//!
//! * unbatched cost per window: `n * p_I`
//! * batched cost per window: `sum_{j=1}^{n-1} j p_I^j p_S + n p_I^n`,
//!   which telescopes to `(1 - p_I^n) / (1/p_I - 1)`
//! * maximum speedup: the ratio, `n (1 - p_I) / (1 - p_I^n)`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupModel {
    n: u32,
    p_increment: f64,
}

impl SpeedupModel {
    pub fn new(n: u32, p_increment: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("batch length must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p_increment) {
            return Err(Error::InvalidProbability(p_increment));
        }
        Ok(Self { n, p_increment })
    }

    /// Parameterized by the share of cheap events instead.
    pub fn from_p_set(n: u32, p_set: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_set) {
            return Err(Error::InvalidProbability(p_set));
        }
        Self::new(n, 1.0 - p_set)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p_increment(&self) -> f64 {
        self.p_increment
    }

    pub fn p_set(&self) -> f64 {
        1.0 - self.p_increment
    }

    fn degenerate(&self) -> bool {
        self.p_increment == 0.0 || self.p_increment == 1.0
    }
}

/// `E[T_1] = n p_I`.
pub fn expected_unbatched_cost(m: &SpeedupModel) -> f64 {
    f64::from(m.n) * m.p_increment
}

/// Closed form `(1 - p_I^n) / (1/p_I - 1)`. At `p_I` of 0 or 1 the closed
/// form is undefined and `DegenerateProbability` carries the limit (0 or n).
pub fn expected_batched_cost(m: &SpeedupModel) -> Result<f64> {
    if m.degenerate() {
        return Err(Error::DegenerateProbability {
            p_increment: m.p_increment,
            limit: if m.p_increment == 0.0 { 0.0 } else { f64::from(m.n) },
        });
    }
    let p = m.p_increment;
    Ok((1.0 - p.powi(m.n as i32)) / (1.0 / p - 1.0))
}

/// Position-wise summation `sum_{j=1}^{n-1} j p_I^j p_S + n p_I^n`: a run of
/// exactly `j` trailing costly events survives, preceded by a cheap one.
pub fn expected_batched_cost_by_summation(m: &SpeedupModel) -> f64 {
    let p = m.p_increment;
    let q = 1.0 - p;
    let n = m.n as i32;
    let runs: f64 = (1..n).map(|j| f64::from(j) * p.powi(j) * q).sum();
    runs + f64::from(n) * p.powi(n)
}

/// `n (1 - p_I) / (1 - p_I^n)`. Degenerate limits: `n` at `p_I = 0`, 1 at
/// `p_I = 1`.
pub fn max_speedup(m: &SpeedupModel) -> Result<f64> {
    if m.degenerate() {
        return Err(Error::DegenerateProbability {
            p_increment: m.p_increment,
            limit: if m.p_increment == 0.0 { f64::from(m.n) } else { 1.0 },
        });
    }
    let p = m.p_increment;
    Ok(f64::from(m.n) * (1.0 - p) / (1.0 - p.powi(m.n as i32)))
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Distance from `value` in standard errors. Zero-variance estimates are
    /// either exact (0) or infinitely far.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.mean - value).abs();
        if self.stderr == 0.0 {
            if diff == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            diff / self.stderr
        }
    }
}

/// Cost of one sampled batch: the number of costly events after the last
/// cheap one.
pub fn surviving_cost(costly: &[bool]) -> u32 {
    costly.iter().rev().take_while(|&&c| c).count() as u32
}

/// Monte-Carlo estimate of the batched cost from `samples` random batches.
pub fn monte_carlo_batched_cost(m: &SpeedupModel, samples: u64, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut batch = vec![false; m.n as usize];
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        batch.iter_mut().for_each(|slot| *slot = rng.gen_bool(m.p_increment));
        let cost = f64::from(surviving_cost(&batch));
        sum += cost;
        sum_sq += cost * cost;
    }
    let count = samples as f64;
    let mean = sum / count;
    let stderr = if samples > 1 {
        let variance = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
        (variance / count).sqrt()
    } else {
        0.0
    };
    Ok(Estimate { mean, stderr })
}
