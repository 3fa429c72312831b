use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use setlaw_cli::{dispatch, Overrides, RunConfig};

/// Set-valued law-of-large-numbers experiments and geometry utilities.
#[derive(Parser, Debug)]
#[command(name = "setlaw", version)]
struct Args {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core. Never changes the outputs.
    #[arg(long, env = "SETLAW_THREADS")]
    threads: Option<usize>,
    /// Exit with status 2 when an acceptance flag fails.
    #[arg(long)]
    strict: bool,
}

fn run(args: &Args) -> Result<Option<String>> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let overrides = Overrides {
        seed: args.seed,
        output_dir: args.out.clone(),
    };
    let config = RunConfig::parse_with(&text, &overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .context("starting the worker pool")?;
    let outcome = pool.install(|| dispatch(&config))?;
    print!("{}", outcome.stdout);
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(reason)) if args.strict => {
            eprintln!("acceptance failure: {reason}");
            ExitCode::from(2)
        }
        Ok(Some(reason)) => {
            eprintln!("warning: {reason}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
