//! Run configuration: optional TOML file, command-line flags on top.

use std::path::{Path, PathBuf};

use favedge_core::stats::{ScheduleKind, ScheduleSpec, MIN_CHECKPOINT};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_EXTREMA_FROM: u64 = 10_000;

/// Keys accepted in a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub steps: Option<u64>,
    pub schedule: Option<String>,
    pub schedule_min: Option<u64>,
    pub gammas: Option<Vec<f64>>,
    pub thresholds: Option<String>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub record_path: Option<bool>,
    pub extrema_from: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub base_seed: u64,
    pub replicas: u64,
    /// Steps per replica; the step budget in inverse-local-time mode.
    pub steps: u64,
    pub schedule: ScheduleSpec,
    pub gammas: Vec<f64>,
    pub thresholds: Vec<u64>,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub record_path: bool,
    /// Running extrema only consider checkpoints at or after this time.
    pub extrema_from: u64,
}

impl RunConfig {
    pub fn new(base_seed: u64, replicas: u64, steps: u64, schedule: ScheduleKind) -> Result<Self> {
        let cfg = Self {
            base_seed,
            replicas,
            steps,
            schedule: ScheduleSpec::new(schedule, MIN_CHECKPOINT, steps)?,
            gammas: DEFAULT_GAMMAS.to_vec(),
            thresholds: parse_thresholds("1..512")?,
            workers: 1,
            out_dir: PathBuf::from("out"),
            record_path: false,
            extrema_from: DEFAULT_EXTREMA_FROM,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(CliError::usage("replicas must be at least 1"));
        }
        if self.steps < MIN_CHECKPOINT {
            return Err(CliError::usage(format!(
                "steps must be at least {MIN_CHECKPOINT}"
            )));
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !g.is_finite()) {
            return Err(CliError::usage(
                "gamma grid must be a nonempty list of numbers",
            ));
        }
        if self.workers < 1 {
            return Err(CliError::usage("workers must be at least 1"));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::usage("thresholds must be strictly increasing"));
        }
        Ok(())
    }
}

pub fn parse_gammas(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("bad gamma {t:?}: {e}")))
        })
        .collect()
}

/// `1,2,5` lists thresholds; `A..B` doubles from A up to B.
pub fn parse_thresholds(s: &str) -> Result<Vec<u64>> {
    let bad = |t: &str| CliError::usage(format!("bad threshold list {t:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad(s))?;
        let b: u64 = b.trim().parse().map_err(|_| bad(s))?;
        if a == 0 || a > b {
            return Err(bad(s));
        }
        let mut out = Vec::new();
        let mut r = a;
        while r <= b {
            out.push(r);
            r *= 2;
        }
        return Ok(out);
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<u64>().map_err(|_| bad(s)))
        .collect()
}
