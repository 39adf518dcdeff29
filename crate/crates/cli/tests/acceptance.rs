//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Statistical thresholds were frozen from a pilot sweep with seed
//! `PILOT_SEED`; the acceptance runs use a different seed.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use favedge_cli::cli::EnumerateArgs;
use favedge_cli::commands::{
    cmd_enumerate, cmd_invlt, cmd_simulate, cmd_sweep, distribution_file, AGGREGATE_CSV,
    CARDINALITY_CSV, CHECKPOINTS_CSV, INVLT_SUMMARY_CSV, SUMMARY_CSV,
};
use favedge_cli::config::{parse_thresholds, RunConfig};
use favedge_cli::experiment::{median, run_replica};
use favedge_core::oracle::{
    enumerate_paths, verify_exhaustive, verify_random, Dyadic, RandomVerify, Statistic,
};
use favedge_core::ScheduleKind;

/// Seed of the pilot sweep the thresholds below were frozen from.
const PILOT_SEED: u64 = 20_261_018;
const ACCEPT_SEED: u64 = 1;

const SWEEP_REPLICAS: u64 = 50;
const SWEEP_STEPS: u64 = 100_000_000;
const SWEEP_RATIO: f64 = 1.5;

/// Pilot: median 0.5874, bootstrap SE 0.0441; frozen as median ± 4 SE.
const LIL_EDGE_INTERVAL: (f64, f64) = (0.41, 0.77);
/// Running minimum of the γ-ratio: fraction of replicas showing the
/// expected direction between n = 10^6 and n = 10^8.
const DICHOTOMY_MAJORITY: f64 = 0.70;
/// Pilot: γ = 2 held in 0.84 of replicas, γ = 0.5 decreased in 0.34.
const PILOT_GAMMA2_FRACTION: f64 = 0.84;
const PILOT_GAMMA05_FRACTION: f64 = 0.34;
/// Interval around 1 expected for the Kesten ratio.
const KESTEN_INTERVAL: (f64, f64) = (0.7, 1.3);
/// Pilot: median 1.4159, bootstrap SE 0.0260 (median ± 4 SE).
const PILOT_KESTEN_INTERVAL: (f64, f64) = (1.31, 1.52);

const INVLT_REPLICAS: u64 = 10_000;
const INVLT_R: u64 = 512;
/// 8 r^2; runs still short of r visits by then only censor above the
/// median.
const INVLT_BUDGET: u64 = 8 * INVLT_R * INVLT_R;
const INVLT_TARGET: f64 = 2.0;
const INVLT_TOL: f64 = 0.2;

const MIN_THROUGHPUT: f64 = 5.0e7;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).expect("readable csv");
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let report = verify_exhaustive(12).unwrap();
    let secs = t.elapsed().as_secs_f64();
    Outcome {
        id: "C1",
        name: "exhaustive correctness, all 2^12 paths and prefixes",
        pass: report.passed() && report.paths == 4096 && secs < 60.0,
        detail: format!(
            "{} prefixes, {} oracle comparisons, {} failures, {secs:.1}s",
            report.prefixes_checked, report.oracle_comparisons, report.failures
        ),
    }
}

fn criterion_2() -> Outcome {
    let exhaustive = verify_exhaustive(14).unwrap();
    let random = verify_random(&RandomVerify {
        paths: 100,
        length: 10_000_000,
        seed: ACCEPT_SEED,
        check_times: 1000,
        oracle_prefixes: 0,
    });
    let violations = |r: &favedge_core::oracle::VerifyReport| r.failures;
    Outcome {
        id: "C2",
        name: "favorite edge x implies x-1 favorite downcrossing site",
        pass: exhaustive.passed() && random.passed() && random.lemma_checks >= 99_000,
        detail: format!(
            "(a) 2^14 paths: {} lemma checks, {} violations; (b) 100 x 10^7: {} lemma checks, {} violations",
            exhaustive.lemma_checks,
            violations(&exhaustive),
            random.lemma_checks,
            violations(&random)
        ),
    }
}

fn criterion_3(dir: &Path) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let expected: [(&str, BTreeMap<u64, u64>); 2] = [
        ("card_K", BTreeMap::from([(1, 2), (3, 2)])),
        ("card_E", BTreeMap::from([(1, 2), (2, 2)])),
    ];
    for (stat, want) in expected {
        let args = EnumerateArgs {
            n: 2,
            statistic: stat.to_string(),
            out: dir.to_path_buf(),
        };
        cmd_enumerate(&args).unwrap();
        let (h, rows) = read_csv(&dir.join(distribution_file(2, stat)));
        let (v, p, c, t) = (
            column(&h, "value"),
            column(&h, "probability"),
            column(&h, "paths"),
            column(&h, "total_paths"),
        );
        let got: BTreeMap<u64, u64> = rows
            .iter()
            .map(|r| (r[v].parse().unwrap(), r[c].parse().unwrap()))
            .collect();
        let halves = rows
            .iter()
            .all(|r| r[t] == "4" && r[p].parse::<f64>().unwrap() == 0.5);
        ok &= got == want && halves;
        notes.push(format!("{stat}: {got:?}/4"));
    }
    let means: Vec<Dyadic> = (1..=20)
        .map(|n| enumerate_paths(n, Statistic::XiStar).unwrap().expectation())
        .collect();
    let monotone = means.windows(2).all(|w| w[0] <= w[1]);
    ok &= monotone;
    notes.push(format!(
        "E[xi*(n)] nondecreasing n=1..20: {monotone} (E[xi*(20)] = {})",
        means[19]
    ));
    Outcome {
        id: "C3",
        name: "exact small-n distributions",
        pass: ok,
        detail: notes.join("; "),
    }
}

struct SweepData {
    /// replica -> rows (n, column values)
    rows: BTreeMap<u64, Vec<BTreeMap<String, String>>>,
    cardinality: Vec<(u64, u64)>,
    secs: f64,
}

fn run_acceptance_sweep(dir: &Path) -> SweepData {
    let mut cfg = RunConfig::new(
        ACCEPT_SEED,
        SWEEP_REPLICAS,
        SWEEP_STEPS,
        ScheduleKind::Geometric { ratio: SWEEP_RATIO },
    )
    .unwrap();
    cfg.workers = workers();
    cfg.out_dir = dir.to_path_buf();
    let t = Instant::now();
    cmd_sweep(&cfg).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let (h, rows) = read_csv(&dir.join(AGGREGATE_CSV));
    let replica = column(&h, "replica");
    let mut by_replica: BTreeMap<u64, Vec<BTreeMap<String, String>>> = BTreeMap::new();
    for r in rows {
        let map = h.iter().cloned().zip(r.iter().cloned()).collect();
        by_replica
            .entry(r[replica].parse().unwrap())
            .or_default()
            .push(map);
    }
    let (ch, crows) = read_csv(&dir.join(CARDINALITY_CSV));
    let (start, ge4) = (column(&ch, "decade_start"), column(&ch, "card_E_ge4"));
    let cardinality = crows
        .iter()
        .map(|r| (r[start].parse().unwrap(), r[ge4].parse().unwrap()))
        .collect();
    SweepData {
        rows: by_replica,
        cardinality,
        secs,
    }
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

fn final_medians(data: &SweepData, key: &str) -> f64 {
    let vals: Vec<f64> = data
        .rows
        .values()
        .map(|rows| num(rows.last().unwrap(), key))
        .collect();
    median(&vals)
}

fn criterion_4(data: &SweepData) -> Outcome {
    let m = final_medians(data, "runmax_lil_edge");
    let (lo, hi) = LIL_EDGE_INTERVAL;
    Outcome {
        id: "C4",
        name: "LIL trend for favorite edges (running max of lil_edge)",
        pass: (lo..=hi).contains(&m),
        detail: format!(
            "median over {} replicas at n={SWEEP_STEPS}: {m:.4}; frozen interval [{lo}, {hi}]; sweep {:.0}s",
            data.rows.len(),
            data.secs
        ),
    }
}

/// Running min of `gamma_edge_<g>` over checkpoints in [10^4, limit].
fn running_min(rows: &[BTreeMap<String, String>], g: &str, limit: f64) -> f64 {
    rows.iter()
        .filter(|r| {
            let n = num(r, "n");
            (1e4..=limit).contains(&n)
        })
        .map(|r| num(r, &format!("gamma_edge_{g}")))
        .fold(f64::INFINITY, f64::min)
}

fn criterion_5(data: &SweepData) -> Outcome {
    let total = data.rows.len() as f64;
    let mut held = 0usize;
    let mut dropped = 0usize;
    for rows in data.rows.values() {
        let (a2, b2) = (running_min(rows, "2", 1e6), running_min(rows, "2", 1e8));
        if b2 >= a2 {
            held += 1;
        }
        let (a05, b05) = (running_min(rows, "0.5", 1e6), running_min(rows, "0.5", 1e8));
        if b05 < a05 {
            dropped += 1;
        }
    }
    let (f2, f05) = (held as f64 / total, dropped as f64 / total);
    Outcome {
        id: "C5",
        name: "escape-rate dichotomy trend (gamma = 2 vs gamma = 0.5)",
        pass: f2 >= DICHOTOMY_MAJORITY && f05 >= DICHOTOMY_MAJORITY,
        detail: format!(
            "gamma=2 running min not lowered after 10^6: {f2:.2} (pilot {PILOT_GAMMA2_FRACTION}); \
             gamma=0.5 strictly lowered: {f05:.2} (pilot {PILOT_GAMMA05_FRACTION}); required >= {DICHOTOMY_MAJORITY}"
        ),
    }
}

fn criterion_6(data: &SweepData) -> Outcome {
    let m = final_medians(data, "runmax_lil_site_count");
    let (lo, hi) = KESTEN_INTERVAL;
    let (plo, phi) = PILOT_KESTEN_INTERVAL;
    Outcome {
        id: "C6",
        name: "Kesten LIL trend (running max of xi*/sqrt(2n log log n))",
        pass: (lo..=hi).contains(&m),
        detail: format!(
            "median at n={SWEEP_STEPS}: {m:.4}; required [{lo}, {hi}]; pilot interval [{plo}, {phi}] (inside: {})",
            (plo..=phi).contains(&m)
        ),
    }
}

fn criterion_7(dir: &Path) -> Outcome {
    let mut cfg = RunConfig::new(
        ACCEPT_SEED,
        INVLT_REPLICAS,
        INVLT_BUDGET,
        ScheduleKind::Geometric { ratio: 2.0 },
    )
    .unwrap();
    cfg.thresholds = parse_thresholds(&format!("1..{INVLT_R}")).unwrap();
    cfg.workers = workers();
    cfg.out_dir = dir.to_path_buf();
    cmd_invlt(&cfg).unwrap();
    let (h, rows) = read_csv(&dir.join(INVLT_SUMMARY_CSV));
    let row = rows
        .iter()
        .find(|r| r[column(&h, "r")] == INVLT_R.to_string())
        .unwrap();
    let m: Option<f64> = row[column(&h, "median_log_ratio")].parse().ok();
    let incomplete = &row[column(&h, "incomplete")];
    Outcome {
        id: "C7",
        name: "inverse local time scaling, median log T_r / log r at r = 512",
        pass: m.is_some_and(|m| (m - INVLT_TARGET).abs() <= INVLT_TOL),
        detail: format!(
            "{m:?} over {INVLT_REPLICAS} replicas ({incomplete} censored at {INVLT_BUDGET} steps); target {INVLT_TARGET} +- {INVLT_TOL}"
        ),
    }
}

fn criterion_8(data: &SweepData) -> Outcome {
    let count = |start: u64| {
        data.cardinality
            .iter()
            .find(|(s, _)| *s == start)
            .map(|(_, c)| *c)
    };
    let decades: Vec<(u64, Option<u64>)> = [10_000u64, 100_000, 1_000_000, 10_000_000]
        .iter()
        .map(|&s| (s, count(s)))
        .collect();
    let (prev, last) = (decades[2].1, decades[3].1);
    Outcome {
        id: "C8",
        name: "#E(n) >= 4 per decade over [10^4, 10^8], 50 replicas",
        pass: matches!((prev, last), (Some(p), Some(l)) if l <= p),
        detail: format!(
            "per-decade counts {decades:?}; last two non-increasing: {prev:?} -> {last:?}"
        ),
    }
}

fn criterion_9(dir: &Path) -> Outcome {
    // determinism across worker counts
    let mut cfg = RunConfig::new(
        ACCEPT_SEED,
        6,
        300_000,
        ScheduleKind::Geometric { ratio: 1.5 },
    )
    .unwrap();
    let files = [AGGREGATE_CSV, SUMMARY_CSV, CARDINALITY_CSV];
    let mut outputs = Vec::new();
    for w in [1usize, 4] {
        cfg.workers = w;
        cfg.out_dir = dir.join(format!("w{w}"));
        cmd_sweep(&cfg).unwrap();
        outputs.push(
            files
                .iter()
                .map(|f| std::fs::read(cfg.out_dir.join(f)).unwrap())
                .collect::<Vec<_>>(),
        );
    }
    let identical = outputs[0] == outputs[1];
    let mut single = RunConfig::new(
        ACCEPT_SEED,
        1,
        1_000_000,
        ScheduleKind::Geometric { ratio: 2.0 },
    )
    .unwrap();
    let mut sims = Vec::new();
    for i in 0..2 {
        single.out_dir = dir.join(format!("sim{i}"));
        cmd_simulate(&single, 0).unwrap();
        sims.push(std::fs::read(single.out_dir.join(CHECKPOINTS_CSV)).unwrap());
    }
    let sim_identical = sims[0] == sims[1];

    // single-thread throughput of the full tracker
    let steps = 200_000_000u64;
    let perf = RunConfig::new(7, 1, steps, ScheduleKind::Geometric { ratio: 1.5 }).unwrap();
    let t = Instant::now();
    let run = run_replica(&perf, 0).unwrap();
    let rate = steps as f64 / t.elapsed().as_secs_f64();
    assert_eq!(run.records.last().unwrap().n, steps);
    Outcome {
        id: "C9",
        name: "byte-identical outputs across worker counts; throughput",
        pass: identical && sim_identical && rate >= MIN_THROUGHPUT,
        detail: format!(
            "workers 1 vs 4 identical: {identical}; repeated simulate identical: {sim_identical}; \
             {:.1}e6 steps/s single thread (floor {:.0}e6)",
            rate / 1e6,
            MIN_THROUGHPUT / 1e6
        ),
    }
}

fn main() {
    // `cargo test -- --list` and filters: this target has one logical test.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    println!("acceptance: seed {ACCEPT_SEED} (thresholds frozen from pilot seed {PILOT_SEED})");
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut outcomes = Vec::new();
    let mut report = |o: Outcome| {
        println!(
            "[{}] {} {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
        outcomes.push(o.pass);
    };
    report(criterion_1());
    report(criterion_2());
    report(criterion_3(&dir.join("enumerate")));
    let sweep = run_acceptance_sweep(&dir.join("sweep"));
    report(criterion_4(&sweep));
    report(criterion_5(&sweep));
    report(criterion_6(&sweep));
    report(criterion_7(&dir.join("invlt")));
    report(criterion_8(&sweep));
    report(criterion_9(&dir.join("determinism")));
    let failed = outcomes.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
