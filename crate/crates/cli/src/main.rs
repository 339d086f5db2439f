//! `sc2`: train policies, run missions and sweeps, and check schedules.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "sc2", version, about = "Multi-drone coverage with charging on a moving rover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Train the actor-critic policy and write a checkpoint and learning curve.
    Train(TrainArgs),
    /// Run one mission and write metrics, logs and map snapshots.
    Simulate(SimulateArgs),
    /// Run a mission per fleet size and seed and tabulate coverage.
    Sweep(SweepArgs),
    /// Solve an assignment instance and cross-check it by enumeration.
    ScheduleCheck(ScheduleCheckArgs),
    /// Re-run the command recorded in a manifest and compare its outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConfigArgs {
    /// Mission config JSON; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PolicyArgs {
    /// Trained checkpoint to fly.
    #[arg(long, conflicts_with = "scripted_policy", required_unless_present = "scripted_policy")]
    pub checkpoint: Option<PathBuf>,
    /// Fly the built-in scripted policy instead of a checkpoint.
    #[arg(long)]
    pub scripted_policy: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    /// Resume from this checkpoint.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Preset name (fig4, line1000, crater-value) or scenario JSON file.
    #[arg(long, default_value = "fig4")]
    pub scenario: String,
    /// Override the scenario horizon.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Override the fleet size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Value map in grid CSV format, fused into the information map.
    #[arg(long)]
    pub value_map: Option<PathBuf>,
    /// Write perception and obstacle snapshots every K steps.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, default_value = "line1000")]
    pub scenario: String,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fleet sizes, as a list (2,4,6) or an inclusive range (2..10).
    #[arg(long, default_value = "2..10")]
    pub n: String,
    /// Number of paired seeds, counting up from the config seed.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScheduleCheckArgs {
    /// Instance JSON: {"cost": [[d or null, ...], ...]} with optional labels.
    pub instance: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Directory for the re-run outputs.
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code as u8)
        }
    }
}
