//! Binary entry point: argument parsing and exit-code mapping.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use energentic_cli::commands;

#[derive(Parser)]
#[command(
    name = "energentic",
    version,
    about = "Deterministic gridworld simulator for energy- and heat-constrained agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and emit trajectory, metrics, and heatmap artifacts.
    Run(CommonArgs),
    /// Train a Q-learning policy and emit the table with its training log.
    Train(CommonArgs),
    /// Map survival horizon over a grid of initial energies and temperatures.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads (artifact bytes do not depend on this).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run the three baseline policies side by side on one seed.
    Compare(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => commands::cmd_run(&args.config, args.out.clone(), args.seed),
        Command::Train(args) => commands::cmd_train(&args.config, args.out.clone(), args.seed),
        Command::Sweep { common, threads } => {
            commands::cmd_sweep(&common.config, common.out.clone(), common.seed, *threads)
        }
        Command::Compare(args) => commands::cmd_compare(&args.config, args.out.clone(), args.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
