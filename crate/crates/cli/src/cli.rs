//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use favedge_core::oracle::Statistic;
use favedge_core::stats::{ScheduleKind, ScheduleSpec};

use crate::config::{
    parse_gammas, parse_thresholds, ConfigFile, RunConfig, DEFAULT_EXTREMA_FROM, DEFAULT_GAMMAS,
};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "favedge",
    version,
    about = "Favorite edges and sites of simple random walk: simulation, enumeration, verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One replica; one CSV row per checkpoint.
    Simulate(RunArgs),
    /// Many replicas in parallel; per-replica rows plus cross-replica summary.
    Sweep(RunArgs),
    /// Exact law of a statistic over all 2^n paths.
    Enumerate(EnumerateArgs),
    /// Exhaustive and random-path invariant checks; exit 3 on any failure.
    Verify(VerifyArgs),
    /// First times the origin's local time exceeds each threshold.
    Invlt(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Steps per replica (step budget for invlt).
    #[arg(long)]
    pub steps: Option<u64>,
    /// geometric:<c>, exppow:<p> or superexp.
    #[arg(long)]
    pub schedule: Option<String>,
    /// First checkpoint time (at least 16).
    #[arg(long)]
    pub schedule_min: Option<u64>,
    /// Comma-separated exponents, e.g. 0.5,1,2.
    #[arg(long)]
    pub gammas: Option<String>,
    /// Comma list, or A..B for doubling thresholds.
    #[arg(long)]
    pub thresholds: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Store the path and check every checkpoint against the oracle.
    #[arg(long)]
    pub record_path: bool,
    /// Running extrema start at this time.
    #[arg(long)]
    pub extrema_from: Option<u64>,
    /// Stream id used by simulate.
    #[arg(long, default_value_t = 0)]
    pub replica: u64,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let steps = self.steps.or(file.steps).unwrap_or(1_000_000);
        let kind: ScheduleKind = self
            .schedule
            .clone()
            .or(file.schedule)
            .unwrap_or_else(|| "geometric:2".to_string())
            .parse()?;
        let n_min = self.schedule_min.or(file.schedule_min).unwrap_or(16);
        let gammas = match (&self.gammas, file.gammas) {
            (Some(s), _) => parse_gammas(s)?,
            (None, Some(v)) => v,
            (None, None) => DEFAULT_GAMMAS.to_vec(),
        };
        let thresholds = parse_thresholds(
            self.thresholds
                .as_deref()
                .or(file.thresholds.as_deref())
                .unwrap_or("1..512"),
        )?;
        let workers = self
            .workers
            .or(file.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let cfg = RunConfig {
            base_seed: self.seed.or(file.seed).unwrap_or(0),
            replicas: self.replicas.or(file.replicas).unwrap_or(1),
            steps,
            schedule: ScheduleSpec::new(kind, n_min, steps)?,
            gammas,
            thresholds,
            workers,
            out_dir: self
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            record_path: self.record_path || file.record_path.unwrap_or(false),
            extrema_from: self
                .extrema_from
                .or(file.extrema_from)
                .unwrap_or(DEFAULT_EXTREMA_FROM),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    /// Path length, at most 24.
    pub n: u32,
    /// card_K, card_E, card_KD, xi_star, L_star, minabs_E, maxabs_E,
    /// minabs_K, maxabs_K, sbar or origin_visits.
    pub statistic: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl EnumerateArgs {
    pub fn statistic(&self) -> Result<Statistic> {
        self.statistic.parse::<Statistic>().map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Check all 2^n paths, every prefix.
    pub n_exhaustive: u32,
    /// Number of random paths.
    pub n_random: u64,
    /// Length of each random path.
    pub len_random: u64,
    pub seed: u64,
    /// Random times per path for invariant and lemma checks.
    #[arg(long, default_value_t = 1000)]
    pub check_times: u64,
    /// Random prefixes per path compared with the oracle.
    #[arg(long, default_value_t = 10)]
    pub oracle_prefixes: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
