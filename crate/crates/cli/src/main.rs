//! Command-line runner for the coexistence simulator.
//!
//! Settings come from an optional flat `key = value` config file; flags
//! override file keys. Exit codes: 0 success, 2 configuration error,
//! 3 i/o error.

use clap::Parser;
use coexsim::config::ExperimentConfig;
use coexsim::experiment::{run_experiment, ExperimentError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "coexsim",
    version,
    about = "Monte-Carlo sweeps of beam-based NR-U/WiGig coexistence at 60 GHz"
)]
struct Args {
    /// Flat key = value config file; flags override its keys.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Pair counts to sweep, e.g. 8,16,24,32,40.
    #[arg(long, value_name = "LIST")]
    k: Option<String>,

    /// Strategies to sweep: nolbt, omni, dir, pair, switch, each optionally
    /// with +lbr; or "all".
    #[arg(long, value_name = "LIST")]
    strategy: Option<String>,

    /// Reception mode(s) at UEs/STAs: omni, quasi, or omni,quasi.
    #[arg(long, value_name = "LIST")]
    reception: Option<String>,

    /// Monte-Carlo drops per sweep cell.
    #[arg(long, value_name = "N")]
    drops: Option<usize>,

    /// Base seed for deterministic drop derivation.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Subcarrier spacing in kHz (sets the receiver-assist overhead).
    #[arg(long, value_name = "N")]
    scs: Option<u32>,

    /// Output directory for results.csv and plot data.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads (0 = auto).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,

    /// Also write a per-drop CSV.
    #[arg(long)]
    dump_drops: bool,
}

fn build_config(args: &Args) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        cfg.apply_file_text(&text)
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
    }
    if let Some(v) = &args.k {
        cfg.apply("k", v).map_err(ExperimentError::from)?;
    }
    if let Some(v) = &args.strategy {
        cfg.apply("strategy", v).map_err(ExperimentError::from)?;
    }
    if let Some(v) = &args.reception {
        cfg.apply("reception", v).map_err(ExperimentError::from)?;
    }
    if let Some(v) = args.drops {
        cfg.n_drops = v;
    }
    if let Some(v) = args.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.scs {
        cfg.scs_khz = v;
    }
    if let Some(v) = &args.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = args.jobs {
        cfg.parallelism = v;
    }
    if args.dump_drops {
        cfg.dump_drops = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = build_config(&args).and_then(|cfg| {
        let files = run_experiment(&cfg)?;
        for f in &files {
            println!("{}", f.display());
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(ExperimentError::Config(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(ExperimentError::Io(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(3)
        }
    }
}
