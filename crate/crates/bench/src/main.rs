use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use batchsim_bench::{cmd_counts, cmd_run, cmd_smax, write_csv, BenchConfig, Result, RunMode};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "batchsim", version, about = "Batched discrete-event simulation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time batched and baseline runs of the increment/set model.
    Run(RunArgs),
    /// Report generated, reachable and redundant batch counts.
    Counts(CountsArgs),
    /// Report expected costs and the maximum speedup.
    Smax(SmaxArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 5)]
    max_batch_len: u32,
    #[arg(long, default_value_t = 0.5)]
    p_set: f64,
    #[arg(long, default_value_t = 10_000)]
    events: u64,
    #[arg(long, default_value_t = 100_000)]
    iterations: u64,
    #[arg(long, default_value_t = 5)]
    runs: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = RunMode::Both)]
    mode: RunMode,
    /// Write per-run rows as CSV to this file ("-" for stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run every p_set in {0.05, 0.25, 0.5, 0.75} for n in 1..=6.
    #[arg(long)]
    sweep: bool,
    /// Skip the untimed warm-up run.
    #[arg(long)]
    no_warmup: bool,
}

#[derive(Args)]
struct CountsArgs {
    #[arg(long, default_value_t = 2)]
    types: u32,
    #[arg(long, default_value_t = 2)]
    max_batch_len: u32,
    /// Also generate the table and check it against the formulas.
    #[arg(long)]
    composed: bool,
}

#[derive(Args)]
struct SmaxArgs {
    #[arg(long, default_value_t = 5)]
    max_batch_len: u32,
    #[arg(long, default_value_t = 0.5)]
    p_set: f64,
    /// Add a Monte-Carlo estimate of the batched cost.
    #[arg(long)]
    monte_carlo: bool,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn run(args: RunArgs) -> Result<()> {
    let base = BenchConfig {
        max_batch_len: args.max_batch_len,
        p_set: args.p_set,
        events: args.events,
        iterations: args.iterations,
        runs: args.runs,
        seed: args.seed,
        mode: args.mode,
        warmup: !args.no_warmup,
    };
    let configs = if args.sweep { base.sweep() } else { vec![base] };
    let to_stdout = args.out.as_deref().is_some_and(|p| p.as_os_str() == "-");
    let mut records = Vec::new();
    for cfg in &configs {
        let summary = cmd_run(cfg)?;
        if to_stdout {
            eprint!("{summary}");
        } else {
            print!("{summary}");
        }
        records.extend(summary.records);
    }
    match args.out {
        Some(_) if to_stdout => write_csv(&records, io::stdout().lock())?,
        Some(path) => write_csv(&records, BufWriter::new(File::create(path)?))?,
        None => {}
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Counts(args) => {
            print!("{}", cmd_counts(args.types, args.max_batch_len, args.composed)?);
            Ok(())
        }
        Command::Smax(args) => {
            let samples = args.monte_carlo.then_some(args.samples);
            print!("{}", cmd_smax(args.max_batch_len, args.p_set, samples, args.seed)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
