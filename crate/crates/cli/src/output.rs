//! CSV writers. Fixed column order, header row, floats with 17 significant
//! digits in scientific notation, `\n` line endings.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use favedge_core::oracle::{ExactDistribution, VerifyReport};
use favedge_core::stats::{CardinalityTally, CheckpointRecord, InverseLocalTimeRecord};

use crate::error::{CliError, Result};
use crate::experiment::{log_ratio, InvltSummary, ReplicaRun, SummaryRow};

/// 17 significant digits; round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvFile {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(|source| CliError::Csv {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(Self {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|source| CliError::Csv {
                path: self.path.clone(),
                source,
            })
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|source| CliError::Io {
            path: self.path.clone(),
            source,
        })
    }
}

const RECORD_COLUMNS: [&str; 20] = [
    "replica",
    "n",
    "position",
    "xi_star",
    "L_star",
    "card_K",
    "card_E",
    "card_KD",
    "minabs_E",
    "maxabs_E",
    "minabs_K",
    "maxabs_K",
    "minabs_KD",
    "maxabs_KD",
    "KD_degenerate",
    "lil_edge",
    "lil_site_count",
    "lil_site",
    "sbar",
    "lil_sbar",
];

fn record_header(rec: &CheckpointRecord) -> Vec<String> {
    let mut h: Vec<String> = RECORD_COLUMNS.iter().map(|s| s.to_string()).collect();
    for g in &rec.gammas {
        h.push(format!("gamma_edge_{}", g.gamma));
        h.push(format!("gamma_site_{}", g.gamma));
        h.push(format!("edge_gap_{}", g.gamma));
    }
    let tracked = rec.tracked();
    h.extend(tracked.iter().map(|(k, _)| format!("runmax_{k}")));
    h.extend(tracked.iter().map(|(k, _)| format!("runmin_{k}")));
    h
}

fn record_row(run: &ReplicaRun, i: usize) -> Vec<String> {
    let r = &run.records[i];
    let mut row = vec![
        run.replica.to_string(),
        r.n.to_string(),
        r.position.to_string(),
        r.xi_star.to_string(),
        r.l_star.to_string(),
        r.card_k.to_string(),
        r.card_e.to_string(),
        r.card_kd.to_string(),
        r.minabs_e.to_string(),
        r.maxabs_e.to_string(),
        r.minabs_k.to_string(),
        r.maxabs_k.to_string(),
        r.minabs_kd.to_string(),
        r.maxabs_kd.to_string(),
        u8::from(r.kd_degenerate).to_string(),
        fmt_f64(r.lil_edge),
        fmt_f64(r.lil_site_count),
        fmt_f64(r.lil_site),
        r.sbar.to_string(),
        fmt_f64(r.lil_sbar),
    ];
    for g in &r.gammas {
        row.push(fmt_f64(g.edge_ratio));
        row.push(fmt_f64(g.site_ratio));
        row.push(g.edge_gap.to_string());
    }
    let names: Vec<String> = r.tracked().into_iter().map(|(k, _)| k).collect();
    let ext = run.extrema[i].as_ref();
    row.extend(
        names
            .iter()
            .map(|k| fmt_opt(ext.and_then(|e| e.max(k)).map(|x| x.value))),
    );
    row.extend(
        names
            .iter()
            .map(|k| fmt_opt(ext.and_then(|e| e.min(k)).map(|x| x.value))),
    );
    row
}

/// One row per replica per checkpoint, sorted by (replica, n).
pub fn write_checkpoints(path: &Path, runs: &[ReplicaRun]) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    if let Some(rec) = runs.iter().find_map(|r| r.records.first()) {
        f.row(record_header(rec))?;
    }
    for run in runs {
        for i in 0..run.records.len() {
            f.row(record_row(run, i))?;
        }
    }
    f.finish()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow], replicas: usize) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    if let Some(first) = rows.first() {
        let mut h = vec!["n".to_string(), "replicas".to_string()];
        for c in &first.cells {
            h.push(format!("{}_q25", c.name));
            h.push(format!("{}_median", c.name));
            h.push(format!("{}_q75", c.name));
        }
        f.row(h)?;
    }
    for row in rows {
        let mut out = vec![row.n.to_string(), replicas.to_string()];
        for c in &row.cells {
            match c.quantiles {
                Some(q) => out.extend(q.iter().map(|&v| fmt_f64(v))),
                None => out.extend(std::iter::repeat_n(String::new(), 3)),
            }
        }
        f.row(out)?;
    }
    f.finish()
}

pub fn write_cardinality(path: &Path, tally: &CardinalityTally, steps: u64) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    f.row([
        "decade_start",
        "decade_end",
        "card_E_1",
        "card_E_2",
        "card_E_3",
        "card_E_ge4",
    ])?;
    for (d, counts) in tally.decades().iter().enumerate() {
        let start = 10u64.pow(d as u32).max(1);
        let end = 10u64
            .saturating_pow(d as u32 + 1)
            .saturating_sub(1)
            .min(steps);
        let mut row = vec![start.to_string(), end.to_string()];
        row.extend(counts.iter().map(|c| c.to_string()));
        f.row(row)?;
    }
    f.finish()
}

pub fn write_distribution(path: &Path, dist: &ExactDistribution) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    f.row(["value", "probability", "paths", "total_paths"])?;
    for (&v, &c) in &dist.counts {
        f.row([
            v.to_string(),
            fmt_f64(dist.probability(v)),
            c.to_string(),
            dist.total_paths().to_string(),
        ])?;
    }
    f.finish()
}

pub fn write_verify(path: &Path, reports: &[(&str, &VerifyReport)]) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    f.row([
        "mode",
        "paths",
        "prefixes_checked",
        "oracle_comparisons",
        "lemma_checks",
        "degenerate_skipped",
        "failures",
        "first_failure_path",
        "first_failure_prefix",
        "first_failure_check",
    ])?;
    for (mode, r) in reports {
        let (fp, fx, fc) = match &r.first_failure {
            Some(fl) => (
                fl.path.to_string(),
                fl.prefix.to_string(),
                fl.check.to_string(),
            ),
            None => Default::default(),
        };
        f.row([
            mode.to_string(),
            r.paths.to_string(),
            r.prefixes_checked.to_string(),
            r.oracle_comparisons.to_string(),
            r.lemma_checks.to_string(),
            r.degenerate_skipped.to_string(),
            r.failures.to_string(),
            fp,
            fx,
            fc,
        ])?;
    }
    f.finish()
}

pub fn write_invlt(path: &Path, runs: &[Vec<InverseLocalTimeRecord>]) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    f.row(["replica", "r", "hitting_time", "complete", "log_ratio"])?;
    for (i, recs) in runs.iter().enumerate() {
        for rec in recs {
            f.row([
                i.to_string(),
                rec.r.to_string(),
                rec.hitting_time.map(|t| t.to_string()).unwrap_or_default(),
                u8::from(rec.is_complete()).to_string(),
                fmt_opt(log_ratio(rec)),
            ])?;
        }
    }
    f.finish()
}

pub fn write_invlt_summary(path: &Path, rows: &[InvltSummary]) -> Result<()> {
    let mut f = CsvFile::create(path)?;
    f.row([
        "r",
        "replicas",
        "incomplete",
        "median_hitting_time",
        "median_log_ratio",
    ])?;
    for s in rows {
        f.row([
            s.r.to_string(),
            s.replicas.to_string(),
            s.incomplete.to_string(),
            fmt_opt(s.median_hitting_time),
            fmt_opt(s.median_log_ratio),
        ])?;
    }
    f.finish()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.write_all(b"\n").map_err(io)
}
