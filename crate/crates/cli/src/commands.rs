//! The subcommands: run an experiment, write its CSV files, return a short
//! human-readable summary.

use std::path::PathBuf;

use favedge_core::oracle::{enumerate_paths, verify_exhaustive, verify_random, RandomVerify};

use crate::cli::{EnumerateArgs, VerifyArgs};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::experiment::{
    check_against_oracle, merged_tally, run_invlt, run_replica, run_sweep, summarize,
    summarize_invlt,
};
use crate::output;

pub const CHECKPOINTS_CSV: &str = "checkpoints.csv";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const CARDINALITY_CSV: &str = "cardinality.csv";
pub const PATH_TXT: &str = "path.txt";
pub const VERIFY_CSV: &str = "verify_report.csv";
pub const INVLT_CSV: &str = "inverse_local_time.csv";
pub const INVLT_SUMMARY_CSV: &str = "inverse_local_time_summary.csv";

pub fn distribution_file(n: u32, statistic: &str) -> String {
    format!("distribution_{statistic}_n{n}.csv")
}

/// Single replica `replica` (its stream id).
pub fn cmd_simulate(cfg: &RunConfig, replica: u64) -> Result<String> {
    if cfg.replicas != 1 {
        return Err(CliError::usage(
            "simulate runs exactly one replica; use sweep",
        ));
    }
    let run = run_replica(cfg, replica)?;
    let dir = &cfg.out_dir;
    output::write_checkpoints(&dir.join(CHECKPOINTS_CSV), std::slice::from_ref(&run))?;
    output::write_cardinality(&dir.join(CARDINALITY_CSV), &run.tally, cfg.steps)?;
    let mut msg = format!(
        "simulate: {} steps, {} checkpoints -> {}",
        cfg.steps,
        run.records.len(),
        dir.join(CHECKPOINTS_CSV).display()
    );
    if let Some(path) = &run.path {
        output::write_text(&dir.join(PATH_TXT), &path.to_sign_string())?;
        check_against_oracle(&run, &cfg.gammas)?;
        msg.push_str("; all checkpoints match the oracle");
    }
    Ok(msg)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String> {
    if cfg.replicas < 2 {
        return Err(CliError::usage("sweep needs at least 2 replicas"));
    }
    let runs = run_sweep(cfg)?;
    if cfg.record_path {
        for run in &runs {
            check_against_oracle(run, &cfg.gammas)?;
        }
    }
    let dir = &cfg.out_dir;
    output::write_checkpoints(&dir.join(AGGREGATE_CSV), &runs)?;
    let rows = summarize(&runs);
    output::write_summary(&dir.join(SUMMARY_CSV), &rows, runs.len())?;
    output::write_cardinality(&dir.join(CARDINALITY_CSV), &merged_tally(&runs), cfg.steps)?;
    Ok(format!(
        "sweep: {} replicas x {} steps, {} checkpoints -> {}",
        cfg.replicas,
        cfg.steps,
        rows.len(),
        dir.display()
    ))
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> Result<String> {
    let stat = args.statistic()?;
    let dist = enumerate_paths(args.n, stat)?;
    let path = args.out.join(distribution_file(args.n, stat.name()));
    output::write_distribution(&path, &dist)?;
    let mut msg = format!("{} over all 2^{} paths:", stat, args.n);
    for (v, c) in &dist.counts {
        msg.push_str(&format!("\n  {v}: {c}/{}", dist.total_paths()));
    }
    msg.push_str(&format!("\n  expectation {}", dist.expectation()));
    Ok(msg)
}

/// Exit status follows the report: any failure is an invariant error.
pub fn cmd_verify(args: &VerifyArgs) -> Result<String> {
    let run = || {
        let exhaustive = verify_exhaustive(args.n_exhaustive)?;
        let random = verify_random(&RandomVerify {
            paths: args.n_random,
            length: args.len_random,
            seed: args.seed,
            check_times: args.check_times,
            oracle_prefixes: args.oracle_prefixes,
        });
        Ok::<_, CliError>((exhaustive, random))
    };
    let (exhaustive, random) = match args.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    if let Some(dir) = &args.out {
        output::write_verify(
            &dir.join(VERIFY_CSV),
            &[("exhaustive", &exhaustive), ("random", &random)],
        )?;
    }
    let line = |mode: &str, r: &favedge_core::oracle::VerifyReport| {
        format!(
            "{mode}: {} paths, {} prefixes, {} oracle comparisons, {} lemma checks, {} failures",
            r.paths, r.prefixes_checked, r.oracle_comparisons, r.lemma_checks, r.failures
        )
    };
    let msg = format!(
        "{}\n{}",
        line("exhaustive", &exhaustive),
        line("random", &random)
    );
    for r in [&exhaustive, &random] {
        if let Some(f) = &r.first_failure {
            return Err(CliError::Invariant(format!(
                "{msg}\nfirst failure: path {} prefix {} check {}",
                f.path, f.prefix, f.check
            )));
        }
    }
    Ok(msg)
}

pub fn cmd_invlt(cfg: &RunConfig) -> Result<String> {
    let runs = run_invlt(cfg)?;
    let dir: &PathBuf = &cfg.out_dir;
    output::write_invlt(&dir.join(INVLT_CSV), &runs)?;
    let summary = summarize_invlt(&runs);
    output::write_invlt_summary(&dir.join(INVLT_SUMMARY_CSV), &summary)?;
    let mut msg = format!(
        "invlt: {} replicas, budget {} steps",
        cfg.replicas, cfg.steps
    );
    for s in &summary {
        msg.push_str(&format!(
            "\n  r={}: incomplete {}, median log T/log r {}",
            s.r,
            s.incomplete,
            s.median_log_ratio
                .map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
        ));
    }
    Ok(msg)
}
