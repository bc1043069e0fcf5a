use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::Failure;

/// Reliability and availability of carrier-assisted cold storage.
#[derive(Debug, Parser)]
#[command(name = "coldsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the Markov state space as CSV.
    States {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Number of per-node states.
        #[arg(long, default_value_t = 3)]
        s: usize,
    },
    /// Fit a Weibull SBF distribution to an exchange log.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// JSON destination; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Analytic lower and upper bounds on the mean time to data loss.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte Carlo estimate of MTTDL and MTTDU.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Per-trial CSV destination.
        #[arg(long)]
        trials_csv: Option<PathBuf>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Batch simulations over a grid of exchange or carrier repair rates.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// exchange_rate or carrier_repair_rate.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated, strictly increasing values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::States { n, k, s } => commands::states(n, k, s),
        Command::Fit { input, output } => commands::fit(&input, output.as_deref()),
        Command::Bounds { config } => commands::bounds(&config),
        Command::Simulate {
            config,
            trials_csv,
            workers,
        } => commands::simulate(&config, trials_csv.as_deref(), workers),
        Command::Sweep {
            config,
            axis,
            grid,
            output,
            workers,
        } => commands::sweep(&config, axis.as_deref(), grid, output.as_deref(), workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("coldsim: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Numerical(_) => 4,
            Failure::Output(_) => 1,
        }
    }
}
