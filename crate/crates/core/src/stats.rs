//! Scaled functionals at checkpoint times, running extrema over a run,
//! inverse local times at the origin and favorite-edge cardinality tallies.
//!
//! All logarithms are natural.

use std::fmt;

use thiserror::Error;

use crate::favorites::{extremal_abs, FavoritesState, Walker};
use crate::local_time::CountField;
use crate::path::StepStream;

/// Smallest checkpoint time; `log log n > 0` needs `n > e^e ≈ 15.15`.
pub const MIN_CHECKPOINT: u64 = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatError {
    #[error("n = {n} is below the minimum {min} for this statistic")]
    TimeTooSmall { n: u64, min: u64 },
    #[error("negative argument {0}")]
    Negative(f64),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("thresholds must be strictly increasing")]
    Thresholds,
    #[error("favorite set is empty at n = {0}")]
    EmptySet(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// ⌈n_min · c^k⌉, k = 0, 1, ...
    Geometric { ratio: f64 },
    /// ⌈exp(k^p)⌉, k = 1, 2, ...
    ExpPow { p: f64 },
    /// k^(5k), k = 1, 2, ...
    SuperExp,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleKind::Geometric { ratio } => write!(f, "geometric:{ratio}"),
            ScheduleKind::ExpPow { p } => write!(f, "exppow:{p}"),
            ScheduleKind::SuperExp => f.write_str("superexp"),
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = StatError;

    /// Parses `geometric:1.5`, `exppow:2`, `superexp`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let num = |p: Option<&str>| -> Result<f64, StatError> {
            p.ok_or_else(|| StatError::Schedule(format!("{kind} needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| StatError::Schedule(format!("{s}: {e}")))
        };
        let parsed = match kind {
            "geometric" => ScheduleKind::Geometric { ratio: num(param)? },
            "exppow" => ScheduleKind::ExpPow { p: num(param)? },
            "superexp" => ScheduleKind::SuperExp,
            other => return Err(StatError::Schedule(format!("unknown kind {other:?}"))),
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

impl ScheduleKind {
    fn validate(&self) -> Result<(), StatError> {
        match *self {
            ScheduleKind::Geometric { ratio } if !(ratio > 1.0 && ratio.is_finite()) => Err(
                StatError::Schedule(format!("geometric ratio must exceed 1, got {ratio}")),
            ),
            ScheduleKind::ExpPow { p } if !(p > 1.0 && p.is_finite()) => Err(StatError::Schedule(
                format!("exppow exponent must exceed 1, got {p}"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub n_min: u64,
    pub n_max: u64,
}

impl ScheduleSpec {
    pub fn new(kind: ScheduleKind, n_min: u64, n_max: u64) -> Result<Self, StatError> {
        kind.validate()?;
        if n_min < MIN_CHECKPOINT {
            return Err(StatError::TimeTooSmall {
                n: n_min,
                min: MIN_CHECKPOINT,
            });
        }
        Ok(Self { kind, n_min, n_max })
    }
}

/// Checkpoint times of a schedule, strictly increasing, inside
/// `[n_min, n_max]`. Empty when `n_min > n_max`.
pub fn schedule_points(spec: &ScheduleSpec) -> Vec<u64> {
    let (lo, hi) = (spec.n_min, spec.n_max);
    let mut out: Vec<u64> = Vec::new();
    if lo > hi {
        return out;
    }
    let mut push = |v: u64| {
        if v >= lo && v <= hi && out.last().is_none_or(|&l| v > l) {
            out.push(v);
        }
    };
    match spec.kind {
        ScheduleKind::Geometric { ratio } => {
            for k in 0.. {
                let v = (lo as f64 * ratio.powi(k)).ceil();
                if v > hi as f64 {
                    break;
                }
                push(v as u64);
            }
        }
        ScheduleKind::ExpPow { p } => {
            for k in 1u32.. {
                let v = (k as f64).powf(p).exp().ceil();
                if v > hi as f64 {
                    break;
                }
                push(v as u64);
            }
        }
        ScheduleKind::SuperExp => {
            for k in 1u64.. {
                match k.checked_pow(5 * k as u32) {
                    Some(v) if v <= hi => push(v),
                    _ => break,
                }
            }
        }
    }
    out
}

/// `a / sqrt(2 n log log n)`.
pub fn lil_ratio(n: u64, a: f64) -> Result<f64, StatError> {
    if n < MIN_CHECKPOINT {
        return Err(StatError::TimeTooSmall {
            n,
            min: MIN_CHECKPOINT,
        });
    }
    if a < 0.0 {
        return Err(StatError::Negative(a));
    }
    let nf = n as f64;
    Ok(a / (2.0 * nf * nf.ln().ln()).sqrt())
}

/// `a / (sqrt(n) (log n)^-γ)`, i.e. `a (log n)^γ / sqrt(n)`.
pub fn gamma_ratio(n: u64, a: f64, gamma: f64) -> Result<f64, StatError> {
    if n < 3 {
        return Err(StatError::TimeTooSmall { n, min: 3 });
    }
    if a < 0.0 {
        return Err(StatError::Negative(a));
    }
    let nf = n as f64;
    Ok(a * nf.ln().powf(gamma) / nf.sqrt())
}

/// Window radius `sqrt(n) (log n)^-γ` used by the edge gap statistic.
pub fn gamma_window(n: u64, gamma: f64) -> f64 {
    let nf = n as f64;
    nf.sqrt() * nf.ln().powf(-gamma)
}

/// Statistics depending on one exponent γ.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaStats {
    pub gamma: f64,
    /// min |ℰ(n)| scaled by `sqrt(n) (log n)^-γ`.
    pub edge_ratio: f64,
    /// min |𝒦(n)| under the same scaling.
    pub site_ratio: f64,
    /// `max L - max_{|x| <= window} L`, unthresholded.
    pub edge_gap: u64,
}

/// Everything observed at one checkpoint time.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRecord {
    pub n: u64,
    pub position: i64,
    /// ξ*(n)
    pub xi_star: u64,
    /// max_x L(x,n)
    pub l_star: u64,
    pub card_k: usize,
    pub card_e: usize,
    pub card_kd: usize,
    pub minabs_e: u64,
    pub maxabs_e: u64,
    pub minabs_k: u64,
    pub maxabs_k: u64,
    pub minabs_kd: u64,
    pub maxabs_kd: u64,
    pub kd_degenerate: bool,
    /// max |ℰ(n)| / sqrt(2 n log log n)
    pub lil_edge: f64,
    /// ξ*(n) / sqrt(2 n log log n)
    pub lil_site_count: f64,
    /// max |𝒦(n)| / sqrt(2 n log log n)
    pub lil_site: f64,
    /// max_{k<=n} S_k
    pub sbar: i64,
    /// S̄_n / sqrt(2 n log log n)
    pub lil_sbar: f64,
    pub gammas: Vec<GammaStats>,
}

pub fn record_checkpoint(
    favorites: &FavoritesState,
    field: &CountField,
    gammas: &[f64],
) -> Result<CheckpointRecord, StatError> {
    let n = field.n();
    if n < MIN_CHECKPOINT {
        return Err(StatError::TimeTooSmall {
            n,
            min: MIN_CHECKPOINT,
        });
    }
    let ext = |m: &[i64]| extremal_abs(m).map_err(|_| StatError::EmptySet(n));
    let (minabs_e, maxabs_e) = ext(favorites.favorite_edges())?;
    let (minabs_k, maxabs_k) = ext(favorites.favorite_sites())?;
    let (minabs_kd, maxabs_kd) = ext(favorites.favorite_downcross())?;
    let l_star = favorites.edges.max_value();
    let sbar = field.hi();
    let gammas = gammas
        .iter()
        .map(|&gamma| {
            let window = gamma_window(n, gamma).floor() as u64;
            Ok(GammaStats {
                gamma,
                edge_ratio: gamma_ratio(n, minabs_e as f64, gamma)?,
                site_ratio: gamma_ratio(n, minabs_k as f64, gamma)?,
                edge_gap: l_star - field.max_edge_count_within(window),
            })
        })
        .collect::<Result<Vec<_>, StatError>>()?;
    Ok(CheckpointRecord {
        n,
        position: field.position(),
        xi_star: favorites.sites.max_value(),
        l_star,
        card_k: favorites.sites.len(),
        card_e: favorites.edges.len(),
        card_kd: favorites.downcross.len(),
        minabs_e,
        maxabs_e,
        minabs_k,
        maxabs_k,
        minabs_kd,
        maxabs_kd,
        kd_degenerate: favorites.downcross_degenerate(),
        lil_edge: lil_ratio(n, maxabs_e as f64)?,
        lil_site_count: lil_ratio(n, favorites.sites.max_value() as f64)?,
        lil_site: lil_ratio(n, maxabs_k as f64)?,
        sbar,
        lil_sbar: lil_ratio(n, sbar.max(0) as f64)?,
        gammas,
    })
}

impl CheckpointRecord {
    pub fn from_walker(walker: &Walker, gammas: &[f64]) -> Result<Self, StatError> {
        record_checkpoint(walker.favorites(), walker.field(), gammas)
    }

    /// Named ratios tracked by [`RunningExtrema`], in a fixed order.
    pub fn tracked(&self) -> Vec<(String, f64)> {
        let mut v = vec![
            ("lil_edge".to_string(), self.lil_edge),
            ("lil_site_count".to_string(), self.lil_site_count),
            ("lil_site".to_string(), self.lil_site),
            ("lil_sbar".to_string(), self.lil_sbar),
        ];
        for g in &self.gammas {
            v.push((format!("gamma_edge_{}", g.gamma), g.edge_ratio));
            v.push((format!("gamma_site_{}", g.gamma), g.site_ratio));
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub n: u64,
}

/// Running minimum and maximum of each tracked ratio over the checkpoints
/// seen so far; the empirical stand-ins for liminf and limsup.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunningExtrema {
    names: Vec<String>,
    min: Vec<Extremum>,
    max: Vec<Extremum>,
}

impl RunningExtrema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ties keep the earliest attaining time, so repeating a record is a
    /// no-op.
    pub fn update(&mut self, record: &CheckpointRecord) {
        self.update_values(record.n, &record.tracked());
    }

    pub fn update_values(&mut self, n: u64, values: &[(String, f64)]) {
        if self.names.is_empty() {
            self.names = values.iter().map(|(k, _)| k.clone()).collect();
            self.min = values
                .iter()
                .map(|&(_, v)| Extremum { value: v, n })
                .collect();
            self.max = self.min.clone();
            return;
        }
        debug_assert_eq!(self.names.len(), values.len());
        for (i, (_, v)) in values.iter().enumerate() {
            if *v < self.min[i].value {
                self.min[i] = Extremum { value: *v, n };
            }
            if *v > self.max[i].value {
                self.max[i] = Extremum { value: *v, n };
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn min(&self, name: &str) -> Option<Extremum> {
        self.position(name).map(|i| self.min[i])
    }

    pub fn max(&self, name: &str) -> Option<Extremum> {
        self.position(name).map(|i| self.max[i])
    }

    pub fn mins(&self) -> &[Extremum] {
        &self.min
    }

    pub fn maxs(&self) -> &[Extremum] {
        &self.max
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|k| k == name)
    }
}

/// First time the origin's local time exceeds `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseLocalTimeRecord {
    pub r: u64,
    /// `None` if the step budget ran out first.
    pub hitting_time: Option<u64>,
}

impl InverseLocalTimeRecord {
    pub fn is_complete(&self) -> bool {
        self.hitting_time.is_some()
    }
}

/// Watches ξ(0, n) and records T_r for each threshold in turn.
#[derive(Debug, Clone)]
pub struct InverseLocalTimeTracker {
    thresholds: Vec<u64>,
    hits: Vec<Option<u64>>,
    next: usize,
}

impl InverseLocalTimeTracker {
    pub fn new(thresholds: &[u64]) -> Result<Self, StatError> {
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StatError::Thresholds);
        }
        Ok(Self {
            thresholds: thresholds.to_vec(),
            hits: vec![None; thresholds.len()],
            next: 0,
        })
    }

    /// Reports that ξ(0, n) = `origin_visits`. Calls must come in time
    /// order, starting at n = 0.
    #[inline]
    pub fn observe(&mut self, n: u64, origin_visits: u64) {
        while self.next < self.thresholds.len() && origin_visits > self.thresholds[self.next] {
            self.hits[self.next] = Some(n);
            self.next += 1;
        }
    }

    pub fn is_done(&self) -> bool {
        self.next == self.thresholds.len()
    }

    /// Threshold currently awaited.
    pub fn pending(&self) -> Option<u64> {
        self.thresholds.get(self.next).copied()
    }

    pub fn finish(self) -> Vec<InverseLocalTimeRecord> {
        self.thresholds
            .into_iter()
            .zip(self.hits)
            .map(|(r, hitting_time)| InverseLocalTimeRecord { r, hitting_time })
            .collect()
    }
}

/// Runs a walk from the origin for at most `budget` steps and returns T_r
/// for every threshold.
pub fn inverse_local_time_track(
    stream: &mut StepStream,
    thresholds: &[u64],
    budget: u64,
) -> Result<Vec<InverseLocalTimeRecord>, StatError> {
    let mut tracker = InverseLocalTimeTracker::new(thresholds)?;
    let mut visits = 1u64;
    tracker.observe(0, visits);
    let mut pos = 0i64;
    let mut n = 0u64;
    while !tracker.is_done() && n < budget {
        // only visits to the origin change what the tracker sees
        let target = tracker.pending().unwrap_or(u64::MAX);
        while n < budget {
            pos += stream.next_step().value();
            n += 1;
            if pos == 0 {
                visits += 1;
                if visits > target {
                    break;
                }
            }
        }
        tracker.observe(n, visits);
    }
    Ok(tracker.finish())
}

/// Counts of times n with #ℰ(n) = 1, 2, 3 and ≥ 4, bucketed by decade
/// `[10^d, 10^(d+1))`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CardinalityTally {
    decades: Vec<[u64; 4]>,
    current: usize,
    next_boundary: u64,
}

impl CardinalityTally {
    pub fn new() -> Self {
        Self {
            decades: vec![[0; 4]],
            current: 0,
            next_boundary: 10,
        }
    }

    /// `n` must be ≥ 1 and nondecreasing across calls; `card` ≥ 1.
    #[inline]
    pub fn record(&mut self, n: u64, card: usize) {
        while n >= self.next_boundary {
            self.current += 1;
            self.next_boundary = self.next_boundary.saturating_mul(10);
            self.decades.push([0; 4]);
        }
        self.decades[self.current][card.clamp(1, 4) - 1] += 1;
    }

    /// Per decade `d`: counts for cardinality 1, 2, 3, ≥4.
    pub fn decades(&self) -> &[[u64; 4]] {
        &self.decades
    }

    pub fn merge(&mut self, other: &CardinalityTally) {
        if other.decades.len() > self.decades.len() {
            self.decades.resize(other.decades.len(), [0; 4]);
        }
        for (a, b) in self.decades.iter_mut().zip(&other.decades) {
            for i in 0..4 {
                a[i] += b[i];
            }
        }
    }
}
