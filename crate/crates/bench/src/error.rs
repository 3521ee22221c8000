use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Sim(#[from] batchsim::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("run {run}: batched final sum {batched} differs from baseline {baseline}")]
    Divergence { run: u32, batched: u64, baseline: u64 },

    #[error("composed table disagrees with the count formulas: {0}")]
    CountMismatch(String),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
