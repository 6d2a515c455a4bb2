//! Command-line entry point for the two-way-channel bound pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twcap::cli::{cmd_report, cmd_sweep, exit_code, RunConfig};

#[derive(Parser)]
#[command(
    name = "twcap",
    about = "Capacity-region bounds and symmetry screens for two-way channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Channel file (JSON)
    #[arg(long)]
    channel: PathBuf,
    /// Simplex grid step (1/delta must be an integer)
    #[arg(long, default_value_t = 0.025)]
    delta: f64,
    /// Local refinement resolution for the optimizers
    #[arg(long, default_value_t = 1e-6)]
    refine_tol: f64,
    /// Gap threshold for symmetry verdicts
    #[arg(long, default_value_t = 1e-6)]
    sym_tol: f64,
    /// Also sweep the joint-input grid outer bound
    #[arg(long)]
    grid_outer: bool,
    /// Grid step for joint-input sweeps
    #[arg(long, default_value_t = 0.1)]
    grid_outer_delta: f64,
    /// Output directory
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (0 = auto)
    #[arg(long, default_value_t = 0, env = "TWC_THREADS")]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Assess one channel: symmetry screens, bounds, report files
    Report {
        #[command(flatten)]
        common: CommonArgs,
        /// Substitution value for parameterized fixtures
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Tabulate alpha*, beta*, and epsilon across gamma values
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated gamma values
        #[arg(long, value_delimiter = ',')]
        gammas: Vec<f64>,
    },
}

fn to_run_config(common: &CommonArgs, gamma: Option<f64>) -> RunConfig {
    let mut cfg = RunConfig::new(&common.channel, &common.out_dir);
    cfg.delta = common.delta;
    cfg.refine_tol = common.refine_tol;
    cfg.sym_tol = common.sym_tol;
    cfg.with_grid_outer = common.grid_outer;
    cfg.grid_outer_delta = common.grid_outer_delta;
    cfg.gamma = gamma;
    cfg.threads = common.threads;
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Report { common, gamma } => cmd_report(&to_run_config(common, *gamma)),
        Command::Sweep { common, gammas } => {
            cmd_sweep(&to_run_config(common, None), gammas).map(|_| ())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
