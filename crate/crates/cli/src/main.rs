//! Command-line front end.
//!
//! ```text
//! edgestep gen        --config run.cfg [--seed N] [--out DIR] [--threads N]
//! edgestep experiment --config run.cfg [--seed N] [--out DIR] [--threads N]
//! edgestep conditions --config run.cfg [--out DIR]
//! edgestep percolate  --graph g.edges --rate A --threshold R --seed N
//!                     [--c-list 0.1,0.5] [--max-rounds N] [--out FILE]
//! ```
//!
//! Exit codes: 0 on success, 2 for usage/config errors, 3 for runtime
//! resource errors.

mod commands;
mod config;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum AppError {
    /// Bad input: exit code 2.
    Usage(String),
    /// Resource or I/O failure: exit code 3.
    Runtime(String),
}

impl AppError {
    fn usage(msg: impl Display) -> Self {
        AppError::Usage(msg.to_string())
    }

    fn runtime(msg: impl Display) -> Self {
        AppError::Runtime(msg.to_string())
    }
}

#[derive(Parser)]
#[command(name = "edgestep", version, about = "Edge-step graph process simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate trajectories and write edge-list snapshots.
    Gen(ConfigArgs),
    /// Run the experiment named by the config and write CSV/JSON results.
    Experiment(ConfigArgs),
    /// Report summability conditions and normalizer diagnostics.
    Conditions(ConfigArgs),
    /// Bootstrap percolation on an edge-list file.
    Percolate {
        /// Edge-list file produced by `gen` (or compatible).
        #[arg(long)]
        graph: PathBuf,
        /// Infection rate `a`; round 0 infects with probability `a / V`.
        #[arg(long)]
        rate: f64,
        /// Infection threshold `r >= 2`.
        #[arg(long)]
        threshold: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated target fractions for the stopping times.
        #[arg(long, value_delimiter = ',')]
        c_list: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_rounds: u64,
        /// Write the run JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn apply_overrides(cfg: &mut RunConfig, args: &ConfigArgs) {
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
}

fn init_threads(threads: usize) {
    if threads > 0 {
        // ignore failure if a pool already exists (tests call this twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Gen(args) => {
            let mut cfg = RunConfig::load(&args.config).map_err(AppError::usage)?;
            apply_overrides(&mut cfg, &args);
            init_threads(cfg.threads);
            commands::cmd_gen(&cfg)
        }
        Command::Experiment(args) => {
            let mut cfg = RunConfig::load(&args.config).map_err(AppError::usage)?;
            apply_overrides(&mut cfg, &args);
            init_threads(cfg.threads);
            commands::cmd_experiment(&cfg).map(|_| ())
        }
        Command::Conditions(args) => {
            let (mut cfg, params) =
                RunConfig::load_conditions(&args.config).map_err(AppError::usage)?;
            apply_overrides(&mut cfg, &args);
            init_threads(cfg.threads);
            commands::run_experiment(
                &cfg,
                edgestep::experiments::ExperimentKind::Conditions(params),
            )
            .map(|_| ())
        }
        Command::Percolate {
            graph,
            rate,
            threshold,
            seed,
            c_list,
            max_rounds,
            out,
        } => commands::cmd_percolate(
            &graph,
            rate,
            threshold,
            seed,
            &c_list,
            max_rounds,
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
