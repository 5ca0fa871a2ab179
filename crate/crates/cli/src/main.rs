use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kolmo_box::{cmd_balance, cmd_bounds, cmd_decay, cmd_run, cmd_scaling, parse_config, CliError, VerificationSummary};

#[derive(Parser)]
#[command(name = "kolmo-box", version, about = "Periodic-box experiments for Kolmogorov's two-equation turbulence model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir` from the config
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate and write the series, snapshots and basic invariants
    Run(Common),
    /// Fit the decay exponents of k, omega and the length scale
    Decay(Common),
    /// Monitor the comparison envelopes with the guard disabled
    Bounds(Common),
    /// Check the integral balances under refinement
    Balance(Common),
    /// Check invariance under the two-parameter scaling group
    Scaling {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
}

fn configure_threads() {
    if let Ok(v) = std::env::var("KOLMO_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("cannot size the thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring KOLMO_THREADS = {v:?}"),
        }
    }
}

fn execute(cli: Cli) -> Result<VerificationSummary, CliError> {
    let common = match &cli.command {
        Command::Run(c) | Command::Decay(c) | Command::Bounds(c) | Command::Balance(c) => c,
        Command::Scaling { common, .. } => common,
    };
    let text = std::fs::read_to_string(&common.config)?;
    let cfg = parse_config(&text)?;
    let dir = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    match cli.command {
        Command::Run(_) => cmd_run(&cfg, &dir),
        Command::Decay(_) => cmd_decay(&cfg, &dir),
        Command::Bounds(_) => cmd_bounds(&cfg, &dir),
        Command::Balance(_) => cmd_balance(&cfg, &dir),
        Command::Scaling { rho, gamma, .. } => {
            cmd_scaling(&cfg, rho.unwrap_or(cfg.rho), gamma.unwrap_or(cfg.gamma), &dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    match execute(Cli::parse()) {
        Ok(summary) => {
            println!("{}", summary.to_json());
            for c in summary.failed() {
                eprintln!("FAILED {}: measured {:e}, bound {:e}", c.name, c.measured, c.bound);
            }
            if summary.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
