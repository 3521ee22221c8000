//! The speedup experiment: build a proof-of-concept workload per run, time
//! the engine loop in batched and/or baseline mode, and emit one CSV row per
//! executed mode.

use std::fmt;
use std::io::Write;

use batchsim::analytics::{max_speedup, SpeedupModel};
use batchsim::codec::CodecConfig;
use batchsim::composer::{generate_batch_table, BatchTable};
use batchsim::engine::{run, EngineConfig, RunReport};
use batchsim::model::{validate_model, ValidatedModel};
use batchsim::poc_model::{build_workload, definition, PocModel, PocState, MAX_BATCH_LEN};
use serde::Serialize;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Batched,
    Baseline,
    Both,
}

impl RunMode {
    fn batched(self) -> bool {
        matches!(self, RunMode::Batched | RunMode::Both)
    }

    fn baseline(self) -> bool {
        matches!(self, RunMode::Baseline | RunMode::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub max_batch_len: u32,
    pub p_set: f64,
    pub events: u64,
    pub iterations: u64,
    pub runs: u32,
    pub seed: u64,
    pub mode: RunMode,
    /// One untimed run before the timed ones.
    pub warmup: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            max_batch_len: 5,
            p_set: 0.5,
            events: 10_000,
            iterations: 100_000,
            runs: 5,
            seed: 1,
            mode: RunMode::Both,
            warmup: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(BenchError::InvalidConfig("runs must be at least 1".into()));
        }
        if self.events == 0 {
            return Err(BenchError::InvalidConfig("events must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(BenchError::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_set) {
            return Err(batchsim::Error::InvalidProbability(self.p_set).into());
        }
        if self.max_batch_len == 0 || self.max_batch_len > MAX_BATCH_LEN {
            return Err(batchsim::Error::ConfigTooLarge(format!(
                "max batch length must lie in 1..={MAX_BATCH_LEN}"
            ))
            .into());
        }
        Ok(())
    }

    /// The 24-configuration grid: `p_set` in {0.05, 0.25, 0.5, 0.75} times
    /// `n` in 1..=6, other fields taken from `self`.
    pub fn sweep(&self) -> Vec<BenchConfig> {
        [0.05, 0.25, 0.5, 0.75]
            .into_iter()
            .flat_map(|p_set| {
                (1..=MAX_BATCH_LEN).map(move |n| BenchConfig { max_batch_len: n, p_set, ..self.clone() })
            })
            .collect()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: u32,
    pub p_set: f64,
    pub events: u64,
    pub iterations: u64,
    pub run: u32,
    pub seed: u64,
    pub mode: RunMode,
    pub wall_time_ns: u64,
    /// Baseline over batched wall time; only when both modes ran.
    pub speedup: Option<f64>,
    pub avg_batch_len: f64,
    pub final_sum: u64,
}

pub const CSV_HEADER: &str = "n,p_set,events,iterations,run,seed,mode,wall_time_ns,speedup,avg_batch_len,final_sum";

/// Analytic bound for a configuration. `limit` marks the degenerate cases
/// where the closed form is replaced by its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupBound {
    pub value: f64,
    pub limit: bool,
}

pub fn speedup_bound(n: u32, p_set: f64) -> batchsim::Result<SpeedupBound> {
    match max_speedup(&SpeedupModel::from_p_set(n, p_set)?) {
        Ok(value) => Ok(SpeedupBound { value, limit: false }),
        Err(batchsim::Error::DegenerateProbability { limit, .. }) => Ok(SpeedupBound { value: limit, limit: true }),
        Err(other) => Err(other),
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config: BenchConfig,
    pub records: Vec<BenchRecord>,
    pub s_max: SpeedupBound,
}

impl RunSummary {
    fn mean_of(&self, mode: RunMode, f: impl Fn(&BenchRecord) -> Option<f64>) -> Option<f64> {
        let values: Vec<f64> = self.records.iter().filter(|r| r.mode == mode).filter_map(f).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    pub fn mean_speedup(&self) -> Option<f64> {
        self.mean_of(RunMode::Batched, |r| r.speedup)
    }

    pub fn mean_wall_time_ns(&self, mode: RunMode) -> Option<f64> {
        self.mean_of(mode, |r| Some(r.wall_time_ns as f64))
    }

    pub fn mean_batch_len(&self) -> Option<f64> {
        self.mean_of(RunMode::Batched, |r| Some(r.avg_batch_len))
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "n={} p_set={} events={} iterations={} runs={} seed={}",
            c.max_batch_len, c.p_set, c.events, c.iterations, c.runs, c.seed
        )?;
        let ms = |ns: Option<f64>| ns.map_or("-".to_string(), |ns| format!("{:.3} ms", ns / 1e6));
        writeln!(
            f,
            "  wall time: batched {}, baseline {}",
            ms(self.mean_wall_time_ns(RunMode::Batched)),
            ms(self.mean_wall_time_ns(RunMode::Baseline))
        )?;
        if let Some(len) = self.mean_batch_len() {
            writeln!(f, "  avg batch length: {len:.3}")?;
        }
        let bound = if self.s_max.limit { " (limit)" } else { "" };
        match self.mean_speedup() {
            Some(s) => writeln!(f, "  mean speedup: {s:.4}  s_max: {:.4}{bound}", self.s_max.value),
            None => writeln!(f, "  s_max: {:.4}{bound}", self.s_max.value),
        }
    }
}

struct Prepared {
    model: ValidatedModel<PocModel>,
    table: BatchTable<PocModel>,
}

fn prepare(cfg: &BenchConfig) -> Result<Prepared> {
    let lookahead = i64::try_from(cfg.events).unwrap_or(i64::MAX);
    let model = validate_model(definition(cfg.iterations, lookahead)?)?;
    let table = generate_batch_table(&model, CodecConfig::new(2, cfg.max_batch_len)?)?;
    Ok(Prepared { model, table })
}

struct Measured {
    batched: Option<RunReport<PocState>>,
    baseline: Option<RunReport<PocState>>,
}

fn execute(cfg: &BenchConfig, prepared: &Prepared, seed: u64) -> Result<Measured> {
    let workload = build_workload(cfg.events, cfg.p_set, seed)?;
    let mut measured = Measured { batched: None, baseline: None };
    if cfg.mode.batched() {
        let config = EngineConfig::batched(cfg.max_batch_len);
        measured.batched =
            Some(run(&prepared.model, &prepared.table, config, workload.events.iter().copied())?);
    }
    if cfg.mode.baseline() {
        let config = EngineConfig::baseline();
        measured.baseline = Some(run(&prepared.model, &prepared.table, config, workload.events)?);
    }
    Ok(measured)
}

/// Runs the experiment for one configuration.
pub fn cmd_run(cfg: &BenchConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let s_max = speedup_bound(cfg.max_batch_len, cfg.p_set)?;

    if cfg.warmup {
        execute(cfg, &prepared, cfg.seed)?;
    }

    let mut records = Vec::with_capacity(cfg.runs as usize * 2);
    for run_index in 0..cfg.runs {
        let seed = cfg.seed.wrapping_add(u64::from(run_index));
        let measured = execute(cfg, &prepared, seed)?;
        let speedup = match (&measured.batched, &measured.baseline) {
            (Some(b), Some(base)) => {
                if b.state.sum != base.state.sum {
                    return Err(BenchError::Divergence {
                        run: run_index,
                        batched: b.state.sum,
                        baseline: base.state.sum,
                    });
                }
                Some(base.stats.wall_time.as_secs_f64() / b.stats.wall_time.as_secs_f64())
            }
            _ => None,
        };
        let rows = [(RunMode::Batched, &measured.batched), (RunMode::Baseline, &measured.baseline)];
        for (mode, report) in rows {
            let Some(report) = report else { continue };
            records.push(BenchRecord {
                n: cfg.max_batch_len,
                p_set: cfg.p_set,
                events: cfg.events,
                iterations: cfg.iterations,
                run: run_index,
                seed,
                mode,
                wall_time_ns: u64::try_from(report.stats.wall_time.as_nanos()).unwrap_or(u64::MAX),
                speedup,
                avg_batch_len: report.stats.avg_batch_len(),
                final_sum: report.state.sum,
            });
        }
    }
    Ok(RunSummary { config: cfg.clone(), records, s_max })
}

/// Writes the header and one line per record.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}
