use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swarmtrack_cli::batch::{load_reports, recompute, write_reports, SummaryTable};
use swarmtrack_cli::experiment::default_output_dir;
use swarmtrack_cli::{emit_ecdf_csv, load_config, load_sim_config, run_batch, run_single, BatchOptions, CliError};
use swarmtrack_core::metrics::event_outcomes;
use swarmtrack_core::{LayoutRef, SimConfig};

/// Swarm people-tracking simulator.
#[derive(Parser)]
#[command(name = "swarmtrack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its log.
    Run {
        /// Run config (SimConfig fields at top level).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in layout name or layout file, when no --config is given.
        #[arg(long, default_value = "Env1")]
        layout: String,
        #[arg(long, default_value_t = 4)]
        robots: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Log directory [default: $SWARMTRACK_OUT/run_<seed>]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Run an experiment grid, resuming a previous partial batch.
    Batch {
        #[arg(long)]
        config: PathBuf,
        /// Replaces base_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for one per core
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Discard the manifest and rerun every run.
        #[arg(long)]
        force: bool,
    },
    /// Recompute reports from the logs of a finished batch.
    Metrics {
        /// Batch output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write ECDF CSVs for a batch's reports into <out>/ecdf.
    Ecdf {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, layout, robots, seed, out, force } => {
            let mut config = match config {
                Some(path) => load_sim_config(&path)?,
                None => SimConfig::new(layout.parse::<LayoutRef>().expect("infallible"), robots, 0),
            };
            if let Some(seed) = seed {
                config.seed = seed;
            }
            config.validate()?;
            let out = out.unwrap_or_else(|| default_output_dir().join(format!("run_{}", config.seed)));
            let log = run_single(config, &out, force)?;
            let outcomes = event_outcomes(&log);
            let detected = outcomes.iter().filter(|o| o.detect_delay.is_some()).count();
            println!(
                "{}: {} transitions, {} observations, {} events ({} detected)",
                out.display(),
                log.transitions.len(),
                log.observations.len(),
                outcomes.len(),
                detected
            );
        }
        Command::Batch { config, seed, out, jobs, force } => {
            let mut config = load_config(&config)?;
            if let Some(seed) = seed {
                config.base_seed = seed;
                config.validate()?;
            }
            let output_dir = config.output_root(out.as_deref());
            let summary = run_batch(&config, &BatchOptions { output_dir: output_dir.clone(), jobs, force })?;
            println!(
                "{}: {} runs executed, {} already done",
                output_dir.display(),
                summary.executed,
                summary.skipped
            );
            print!("{}", SummaryTable(&summary.report));
        }
        Command::Metrics { out } => {
            let dir = out.unwrap_or_else(default_output_dir);
            let report = recompute(&dir)?;
            write_reports(&report, &dir)?;
            print!("{}", SummaryTable(&report));
        }
        Command::Ecdf { out, force } => {
            let dir = out.unwrap_or_else(default_output_dir);
            let report = load_reports(&dir)?;
            for path in emit_ecdf_csv(&report, &dir.join("ecdf"), force)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
