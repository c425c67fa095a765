use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "rowswap",
    version,
    about = "Attack-time models and bank simulation for swap-based Rowhammer defenses"
)]
pub struct Cli {
    /// Base configuration file (`key = value` lines); flags override it.
    /// Falls back to $ROWSWAP_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads. Output does not depend on this.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,

    /// Re-run the invocation recorded in a manifest.
    #[arg(long, global = true, value_name = "FILE")]
    pub from_manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form attack time, or outlier horizons for scale-srs.
    Analyze(AnalyzeArgs),
    /// Sampled attack times beside the closed form.
    Montecarlo(MontecarloArgs),
    /// Activation-level bank simulation.
    Simulate(SimulateArgs),
    /// Per-structure storage of RRS against Scale-SRS.
    Storage(StorageArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Montecarlo(_) => "montecarlo",
            Command::Simulate(_) => "simulate",
            Command::Storage(_) => "storage",
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Analyze(a) => a.out.as_ref(),
            Command::Montecarlo(a) => a.out.as_ref(),
            Command::Simulate(a) => a.out.as_ref(),
            Command::Storage(a) => a.out.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TimingPreset {
    Ddr4,
    Ddr5,
    Toy,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DefenseArg {
    None,
    Rrs,
    Srs,
    ScaleSrs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AttackArg {
    Juggernaut,
    Random,
    LatentOnly,
    /// Uniformly random activations (simulate only).
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum McModeArg {
    Geometric,
    Binomial,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AccountingArg {
    SwapLatency,
    ActivationBudget,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize, PartialEq)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub defense: Option<DefenseArg>,
    /// Rowhammer threshold T_RH.
    #[arg(long)]
    pub trh: Option<u32>,
    /// T_RH / T_S.
    #[arg(long, conflicts_with = "ts")]
    pub swap_rate: Option<u32>,
    /// Swap threshold T_S, instead of a swap rate.
    #[arg(long)]
    pub ts: Option<u32>,
    #[arg(long, value_enum)]
    pub timing: Option<TimingPreset>,
    /// Shorthand for `--timing ddr5`.
    #[arg(long, conflicts_with = "timing")]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ddr5: bool,
    /// Rows per bank.
    #[arg(long)]
    pub rows: Option<u32>,
    /// Average latent activations per RRS unswap-swap.
    #[arg(long)]
    pub latent: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub attack: Option<AttackArg>,
    /// Bias rounds N for a single evaluation.
    #[arg(long, conflicts_with = "sweep_rounds")]
    pub rounds: Option<u64>,
    /// Evaluate every N in 0..=MAX.
    #[arg(long, value_name = "MAX")]
    pub sweep_rounds: Option<u64>,
    /// Outlier table for scale-srs: K swaps per row, m = 1..=M rows.
    #[arg(long, value_name = "K,M", value_parser = parse_pair)]
    pub outliers: Option<(u64, u64)>,
    #[arg(long, value_enum, default_value = "swap-latency")]
    pub accounting: AccountingArg,
    /// Output directory; CSV goes to stdout without it.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct MontecarloArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, conflicts_with = "sweep_rounds")]
    pub rounds: Option<u64>,
    /// Sample every N in 0..=MAX (default 1500).
    #[arg(long, value_name = "MAX")]
    pub sweep_rounds: Option<u64>,
    /// Sample every STEP-th N of the sweep.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,
    /// Master seed (≤ 2^63 − 1 so manifests can record it).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "geometric")]
    pub mode: McModeArg,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub attack: Option<AttackArg>,
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Replay row numbers from a file (one per line, `#` comments).
    #[arg(long, value_name = "FILE", conflicts_with = "attack")]
    pub trace: Option<PathBuf>,
    /// Epochs per seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub epochs: u64,
    /// Independent runs; run i uses derive_seed(seed, [i]).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub seeds: u64,
    /// Master seed (≤ 2^63 − 1 so manifests can record it).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: u64,
    /// Stop each run at its first breach.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub until_breach: bool,
    /// Keep one bank across a run's epochs instead of a fresh bank per epoch.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub persist: bool,
    /// Pin-buffer entries (scale-srs); defaults to the configured size.
    #[arg(long)]
    pub pin_capacity: Option<usize>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct StorageArgs {
    #[arg(long)]
    pub trh: Option<u32>,
    #[arg(long, value_enum)]
    pub timing: Option<TimingPreset>,
    #[arg(long, conflicts_with = "timing")]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ddr5: bool,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(',').ok_or("expected K,M")?;
    let k = a.trim().parse().map_err(|_| format!("bad K `{a}`"))?;
    let m = b.trim().parse().map_err(|_| format!("bad M `{b}`"))?;
    Ok((k, m))
}
