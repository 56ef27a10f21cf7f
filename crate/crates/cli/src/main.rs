//! `rppc`: spark checks, single-scene recovery and Monte Carlo sweeps for
//! random pulse phase coded radar.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rppc::analysis::Scenario;

use config::{RunConfig, SubsetKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Config(PathBuf, serde_json::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Lib(#[from] rppc::Error),
    #[error("{0}")]
    Replay(String),
}

#[derive(Debug, Parser)]
#[command(name = "rppc", version, about = "Delay-Doppler recovery for random pulse phase coded radar")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated SNR values in dB.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long, global = true)]
    gamma: Option<usize>,
    /// Random sub-Nyquist subset with K coefficients per PRI.
    #[arg(long, global = true)]
    subnyquist: Option<usize>,
    /// Use z = 1 for every pulse.
    #[arg(long, global = true)]
    no_coding: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Brute-force spark of B against P - Q + 2.
    Spark {
        #[arg(long = "p")]
        pulses: usize,
        #[arg(long = "q")]
        blocks: usize,
        #[arg(long, default_value_t = 20)]
        draws: usize,
    },
    /// Synthesize one scene, recover it and score the estimates.
    Recover {
        /// Scene file; the bundled example when omitted.
        scene: Option<PathBuf>,
        /// Draw a scene from the config's scene settings instead.
        #[arg(long, conflicts_with = "scene")]
        random: bool,
    },
    /// Run a Monte Carlo scenario and write its curves.
    Experiment {
        /// rppc_vs_mprf, offgrid_gamma, sparsity_sweep, worstcase_samebin or timing.
        scenario: Option<Scenario>,
        /// Re-run the config echoed in a result file and compare.
        #[arg(long, conflicts_with = "scenario")]
        replay: Option<PathBuf>,
    },
    /// Print the radar setup and derived quantities.
    Info,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output = o.clone();
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(s) = &cli.snr {
        cfg.snr_db = Some(s.clone());
    }
    if let Some(g) = cli.gamma {
        cfg.gamma = Some(g);
    }
    if let Some(k) = cli.subnyquist {
        cfg.subset.strategy = SubsetKind::Random;
        cfg.subset.k = Some(k);
    }
    cfg.no_coding |= cli.no_coding;

    match cli.command {
        Command::Spark { pulses, blocks, draws } => commands::spark(pulses, blocks, draws, cfg.seed, cfg.no_coding),
        Command::Recover { scene, random } => commands::recover(&cfg, scene.as_deref(), random, cli.out.as_deref()),
        Command::Experiment { scenario, replay } => match replay {
            Some(path) => commands::replay(&path),
            None => commands::experiment(&cfg, scenario),
        },
        Command::Info => commands::info(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
