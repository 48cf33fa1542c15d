use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

/// Online experiment design and identification of LTI systems.
#[derive(Parser, Debug)]
#[command(name = "online-sysid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Bounds {
    /// Upper bound on the lag.
    #[arg(short = 'L', long = "lag-bound")]
    pub lag_bound: Option<usize>,
    /// Upper bound on the state dimension.
    #[arg(long = "upper-n")]
    pub upper_n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an online experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Run this many independent trials with seeds `seed, seed+1, …`.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Test a recorded log for informativity.
    Check {
        #[arg(long)]
        log: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Identify a minimal model from an informative log.
    Identify {
        #[arg(long)]
        log: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Re-run the reference example and the sample-count comparison.
    ReproducePaper {
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Add one to output channel I (1-based) at time T before checking.
        #[arg(long, value_name = "T,I")]
        corrupt: Option<String>,
    },
    /// Compare two system files, or tabulate sample counts.
    Compare {
        /// Two system or model JSON files.
        systems: Vec<PathBuf>,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Input dimension, for the sample-count table.
        #[arg(long)]
        inputs: Option<usize>,
        /// True lag, for the sample-count table.
        #[arg(long)]
        lag: Option<usize>,
        /// True state dimension, for the sample-count table.
        #[arg(long)]
        states: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, bounds, mode, seed, out_dir, trials } => {
            commands::run(&config, &bounds, mode, seed, out_dir, trials)
        }
        Command::Check { log, bounds, mode, out_dir } => commands::check(&log, &bounds, mode, out_dir),
        Command::Identify { log, bounds, mode, out_dir } => {
            commands::identify(&log, &bounds, mode, out_dir)
        }
        Command::ReproducePaper { mode, corrupt } => commands::reproduce(mode, corrupt.as_deref()),
        Command::Compare { systems, bounds, mode, inputs, lag, states } => {
            commands::compare(&systems, &bounds, mode, inputs, lag, states)
        }
    };
    match result {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code.into()
        }
    }
}
