//! Replica runs and cross-replica aggregation. No I/O here.

use favedge_core::oracle::{brute_favorites, brute_local_times};
use favedge_core::stats::{
    inverse_local_time_track, record_checkpoint, schedule_points, CardinalityTally,
    CheckpointRecord, InverseLocalTimeRecord, RunningExtrema,
};
use favedge_core::{RecordedPath, Seed, Step, StepStream, Walker};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Schedule points plus the final time `steps` when it is not on the grid.
pub fn checkpoints(cfg: &RunConfig) -> Vec<u64> {
    let mut pts = schedule_points(&cfg.schedule);
    if pts.last() != Some(&cfg.steps) {
        pts.push(cfg.steps);
    }
    pts
}

/// Output of one replica.
#[derive(Debug, Clone)]
pub struct ReplicaRun {
    pub replica: u64,
    pub records: Vec<CheckpointRecord>,
    /// Running extrema as of each record, over records with
    /// `n >= extrema_from`; `None` before that.
    pub extrema: Vec<Option<RunningExtrema>>,
    /// #ℰ(n) for every n in 1..=steps, by decade.
    pub tally: CardinalityTally,
    pub path: Option<RecordedPath>,
}

pub fn run_replica(cfg: &RunConfig, replica: u64) -> Result<ReplicaRun> {
    let points = checkpoints(cfg);
    let mut stream = StepStream::new(Seed::new(cfg.base_seed, replica));
    let mut walker = Walker::new();
    let mut tally = CardinalityTally::new();
    let mut steps: Option<Vec<Step>> = cfg
        .record_path
        .then(|| Vec::with_capacity(cfg.steps.min(1 << 28) as usize));
    let mut records = Vec::with_capacity(points.len());
    let mut extrema = Vec::with_capacity(points.len());
    let mut running = RunningExtrema::new();
    let mut n = 0u64;
    for &cp in &points {
        match steps.as_mut() {
            None => {
                while n < cp {
                    walker.step(stream.next_step());
                    n += 1;
                    tally.record(n, walker.favorites().edges.len());
                }
            }
            Some(buf) => {
                while n < cp {
                    let s = stream.next_step();
                    buf.push(s);
                    walker.step(s);
                    n += 1;
                    tally.record(n, walker.favorites().edges.len());
                }
            }
        }
        let rec = CheckpointRecord::from_walker(&walker, &cfg.gammas)?;
        if cp >= cfg.extrema_from {
            running.update(&rec);
            extrema.push(Some(running.clone()));
        } else {
            extrema.push(None);
        }
        records.push(rec);
    }
    Ok(ReplicaRun {
        replica,
        records,
        extrema,
        tally,
        path: steps.map(RecordedPath::new),
    })
}

/// Recomputes every checkpoint record of a recorded run from the oracle.
pub fn check_against_oracle(run: &ReplicaRun, gammas: &[f64]) -> Result<()> {
    let path = run
        .path
        .as_ref()
        .ok_or_else(|| CliError::usage("oracle check needs a recorded path"))?;
    for rec in &run.records {
        let m = rec.n as usize;
        let field = brute_local_times(path, m)?;
        let fav = brute_favorites(path, m)?.into_state();
        let expected = record_checkpoint(&fav, &field, gammas)?;
        if &expected != rec {
            return Err(CliError::Invariant(format!(
                "replica {} checkpoint n={} differs from oracle recomputation",
                run.replica, rec.n
            )));
        }
    }
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

/// All replicas, in replica order regardless of worker count.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<ReplicaRun>> {
    pool(cfg.workers)?.install(|| {
        (0..cfg.replicas)
            .into_par_iter()
            .map(|r| run_replica(cfg, r))
            .collect()
    })
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    // frac == 0 must not touch the neighbour: 0 * inf is NaN
    match sorted.get(i + 1) {
        Some(&next) if frac > 0.0 => sorted[i] + frac * (next - sorted[i]),
        _ => sorted[i],
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

pub const SUMMARY_QUANTILES: [f64; 3] = [0.25, 0.5, 0.75];

/// Cross-replica quantiles of one named statistic at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub name: String,
    /// At [`SUMMARY_QUANTILES`]; `None` when no replica has a value.
    pub quantiles: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: u64,
    pub cells: Vec<SummaryCell>,
}

/// Per-checkpoint statistics: the tracked ratios, then running max of each
/// ratio, then running min of each ratio.
fn summary_values(run: &ReplicaRun, i: usize) -> Vec<(String, Option<f64>)> {
    let rec = &run.records[i];
    let tracked = rec.tracked();
    let mut out: Vec<(String, Option<f64>)> =
        tracked.iter().map(|(k, v)| (k.clone(), Some(*v))).collect();
    let ext = run.extrema[i].as_ref();
    for (k, _) in &tracked {
        out.push((
            format!("runmax_{k}"),
            ext.and_then(|e| e.max(k)).map(|x| x.value),
        ));
    }
    for (k, _) in &tracked {
        out.push((
            format!("runmin_{k}"),
            ext.and_then(|e| e.min(k)).map(|x| x.value),
        ));
    }
    out
}

pub fn summarize(runs: &[ReplicaRun]) -> Vec<SummaryRow> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.records.len())
        .map(|i| {
            let per_run: Vec<Vec<(String, Option<f64>)>> =
                runs.iter().map(|r| summary_values(r, i)).collect();
            let cells = (0..per_run[0].len())
                .map(|j| {
                    let mut vals: Vec<f64> = per_run.iter().filter_map(|v| v[j].1).collect();
                    vals.sort_by(f64::total_cmp);
                    SummaryCell {
                        name: per_run[0][j].0.clone(),
                        quantiles: (!vals.is_empty())
                            .then(|| SUMMARY_QUANTILES.map(|q| quantile(&vals, q))),
                    }
                })
                .collect();
            SummaryRow {
                n: first.records[i].n,
                cells,
            }
        })
        .collect()
}

pub fn merged_tally(runs: &[ReplicaRun]) -> CardinalityTally {
    runs.iter().fold(CardinalityTally::new(), |mut acc, r| {
        acc.merge(&r.tally);
        acc
    })
}

/// Inverse local times for every replica; `steps` is the per-replica
/// budget.
pub fn run_invlt(cfg: &RunConfig) -> Result<Vec<Vec<InverseLocalTimeRecord>>> {
    pool(cfg.workers)?.install(|| {
        (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let mut stream = StepStream::new(Seed::new(cfg.base_seed, r));
                inverse_local_time_track(&mut stream, &cfg.thresholds, cfg.steps)
                    .map_err(CliError::from)
            })
            .collect()
    })
}

/// `log T_r / log r`, or `None` when undefined (r ≤ 1) or incomplete.
pub fn log_ratio(rec: &InverseLocalTimeRecord) -> Option<f64> {
    match rec.hitting_time {
        Some(t) if rec.r > 1 && t > 0 => Some((t as f64).ln() / (rec.r as f64).ln()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvltSummary {
    pub r: u64,
    pub replicas: usize,
    pub incomplete: usize,
    /// Median hitting time, counting incomplete runs as +∞; `None` when at
    /// least half are incomplete.
    pub median_hitting_time: Option<f64>,
    pub median_log_ratio: Option<f64>,
}

pub fn summarize_invlt(runs: &[Vec<InverseLocalTimeRecord>]) -> Vec<InvltSummary> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|j| {
            let r = first[j].r;
            let times: Vec<f64> = runs
                .iter()
                .map(|v| v[j].hitting_time.map_or(f64::INFINITY, |t| t as f64))
                .collect();
            let incomplete = times.iter().filter(|t| t.is_infinite()).count();
            let med = median(&times);
            let med = med.is_finite().then_some(med);
            let median_log_ratio =
                med.and_then(|m| (r > 1 && m > 0.0).then(|| m.ln() / (r as f64).ln()));
            InvltSummary {
                r,
                replicas: runs.len(),
                incomplete,
                median_hitting_time: med,
                median_log_ratio,
            }
        })
        .collect()
}
