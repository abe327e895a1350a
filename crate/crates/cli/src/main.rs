mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use commands::Command;
use rmd_core::config::{load_config, preset, RunConfig, PRESETS};

/// Rydberg molecule dressing: potentials, dressed interactions, dynamics and squeezing.
#[derive(Debug, Parser)]
#[command(name = "rmd", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Shipped configuration to use instead of --config.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,

    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Worker threads (1 is the single-threaded reference mode).
    #[arg(long, env = "RYD_SEED_THREADS")]
    threads: Option<usize>,
}

fn load(cli: &Cli) -> Result<Option<RunConfig>> {
    Ok(match (&cli.config, &cli.preset) {
        (Some(path), _) => Some(load_config(path).with_context(|| format!("loading {}", path.display()))?),
        (None, Some(name)) => Some(preset(name)?),
        (None, None) => None,
    })
}

fn run(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        anyhow::ensure!(n > 0, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    let cfg = load(cli)?;
    let outcome = commands::run(cli.command, cfg.as_ref(), &cli.out).with_context(|| format!("{} failed", cli.command.name()))?;
    println!("{}", outcome.summary);
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
