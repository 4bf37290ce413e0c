//! Batch front end: `hardylab --config run.json --out results/`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use hardylab::runner::{run, write_outputs, ExperimentConfig};
use hardylab::Error;

/// Run one experiment config and write its JSON summary and CSV series.
///
/// Exit status: 0 when the run passes, 1 on a property violation or a
/// module error (recorded in the summary), 2 on invalid configs or I/O
/// failures.
#[derive(Debug, Parser)]
#[command(name = "hardylab", version)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides the config's `output`. Without either the
    /// summary is printed to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Overrides the config's `seed`.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the config's `resolution`.
    #[arg(long, value_name = "N")]
    resolution: Option<usize>,
}

fn execute(args: Args) -> anyhow::Result<bool> {
    if let Some(n) = args.threads {
        anyhow::ensure!(n > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(resolution) = args.resolution {
        cfg.resolution = resolution;
    }
    if let Some(out) = args.out {
        cfg.output = Some(out);
    }
    let record = run(&cfg).map_err(|e| match e {
        Error::Config { .. } => anyhow::anyhow!("invalid config {}: {e}", args.config.display()),
        other => other.into(),
    })?;
    match &cfg.output {
        Some(dir) => {
            for path in write_outputs(&record, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => println!("{}", serde_json::to_string_pretty(&record)?),
    }
    let status = if record.passed { "pass" } else { "FAIL" };
    eprintln!(
        "{} {status} ({:.3} s)",
        record.command.as_str(),
        record.wall_time_seconds
    );
    if let Some(err) = &record.error {
        eprintln!("error [{}]: {}", err.kind, err.message);
    }
    Ok(record.passed)
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hardylab: {e:#}");
            ExitCode::from(2)
        }
    }
}
