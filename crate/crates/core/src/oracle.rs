//! Ground truth for the incremental trackers.
//!
//! Everything here recomputes from a stored path by direct scans of the
//! defining formulas. Edge local times are counted through the midpoint
//! form `(S_j + S_{j-1} + 1) / 2`, a different route from the tracker's
//! up/down decomposition. Exact laws of path functionals come from
//! enumerating all `2^n` paths with integer counts.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::favorites::{ArgmaxSet, FavoritesState, Walker};
use crate::local_time::{CountField, FieldInvariant, SiteCounts};
use crate::path::{RecordedPath, Seed, Step, StepStream};

/// Largest path length accepted by [`enumerate_paths`].
pub const MAX_ENUMERATION_LEN: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("path length {0} exceeds the enumeration cap of {MAX_ENUMERATION_LEN}")]
    TooLong(u32),
    #[error("unknown statistic {0:?}")]
    UnknownStatistic(String),
    #[error("prefix {m} is longer than the path ({len} steps)")]
    PrefixTooLong { m: usize, len: usize },
}

/// Counts recomputed by a direct scan of the first `m` steps.
pub fn brute_local_times(path: &RecordedPath, m: usize) -> Result<CountField, OracleError> {
    if m > path.len() {
        return Err(OracleError::PrefixTooLong { m, len: path.len() });
    }
    let s = &path.positions()[..=m];
    let mut counts: BTreeMap<i64, SiteCounts> = BTreeMap::new();
    // ξ(x) = #{0 <= k <= m : S_k = x}
    for &x in s {
        counts.entry(x).or_default().xi += 1;
    }
    for w in s.windows(2) {
        let (before, after) = (w[0], w[1]);
        let c = counts.get_mut(&after).expect("visited");
        if before == after - 1 {
            c.up += 1;
        } else if before == after + 1 {
            c.down += 1;
        }
    }
    let lo = *counts.keys().next().unwrap();
    let hi = *counts.keys().next_back().unwrap();
    let dense = (lo..=hi)
        .map(|x| counts.get(&x).copied().unwrap_or_default())
        .collect();
    Ok(CountField::from_counts(lo, dense, m as u64, s[m]))
}

/// Argmax sets recomputed from scratch, each with its maximum value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteFavorites {
    pub sites: (u64, Vec<i64>),
    pub edges: (u64, Vec<i64>),
    pub downcross: (u64, Vec<i64>),
}

impl BruteFavorites {
    pub fn into_state(self) -> FavoritesState {
        FavoritesState {
            sites: ArgmaxSet::from_parts(self.sites.0, self.sites.1),
            edges: ArgmaxSet::from_parts(self.edges.0, self.edges.1),
            downcross: ArgmaxSet::from_parts(self.downcross.0, self.downcross.1),
        }
    }
}

fn argmax(values: &BTreeMap<i64, u64>) -> (u64, Vec<i64>) {
    let max = values.values().copied().max().unwrap_or(0);
    let members = values
        .iter()
        .filter(|&(_, &v)| v == max)
        .map(|(&x, _)| x)
        .collect();
    (max, members)
}

pub fn brute_favorites(path: &RecordedPath, m: usize) -> Result<BruteFavorites, OracleError> {
    if m > path.len() {
        return Err(OracleError::PrefixTooLong { m, len: path.len() });
    }
    let s = &path.positions()[..=m];
    let mut visits: BTreeMap<i64, u64> = BTreeMap::new();
    let mut downs: BTreeMap<i64, u64> = BTreeMap::new();
    for &x in s {
        *visits.entry(x).or_default() += 1;
        downs.entry(x).or_default();
    }
    // L(y) = #{1 <= j <= m : (S_j + S_{j-1} + 1) / 2 = y}
    let mut edges: BTreeMap<i64, u64> = BTreeMap::new();
    for w in s.windows(2) {
        *edges.entry((w[0] + w[1] + 1).div_euclid(2)).or_default() += 1;
        if w[0] == w[1] + 1 {
            *downs.get_mut(&w[1]).expect("visited") += 1;
        }
    }
    Ok(BruteFavorites {
        sites: argmax(&visits),
        edges: argmax(&edges),
        downcross: argmax(&downs),
    })
}

/// A nonnegative rational with denominator `2^log2_den`.
#[derive(Debug, Clone, Copy)]
pub struct Dyadic {
    pub num: u128,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(num: u128, log2_den: u32) -> Self {
        Self { num, log2_den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (self.log2_den as f64).exp2()
    }

    /// Lowest-terms form.
    pub fn reduced(self) -> Self {
        if self.num == 0 {
            return Self::new(0, 0);
        }
        let shift = self.num.trailing_zeros().min(self.log2_den);
        Self::new(self.num >> shift, self.log2_den - shift)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.reduced(), other.reduced());
        let k = a.log2_den.max(b.log2_den);
        (a.num << (k - a.log2_den)).cmp(&(b.num << (k - b.log2_den)))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        write!(f, "{}/{}", r.num, 1u128 << r.log2_den)
    }
}

/// Path functionals with an exact law under enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    CardK,
    CardE,
    CardKD,
    XiStar,
    LStar,
    MinAbsE,
    MaxAbsE,
    MinAbsK,
    MaxAbsK,
    Sbar,
    OriginVisits,
}

impl Statistic {
    pub const ALL: [Statistic; 11] = [
        Statistic::CardK,
        Statistic::CardE,
        Statistic::CardKD,
        Statistic::XiStar,
        Statistic::LStar,
        Statistic::MinAbsE,
        Statistic::MaxAbsE,
        Statistic::MinAbsK,
        Statistic::MaxAbsK,
        Statistic::Sbar,
        Statistic::OriginVisits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::CardK => "card_K",
            Statistic::CardE => "card_E",
            Statistic::CardKD => "card_KD",
            Statistic::XiStar => "xi_star",
            Statistic::LStar => "L_star",
            Statistic::MinAbsE => "minabs_E",
            Statistic::MaxAbsE => "maxabs_E",
            Statistic::MinAbsK => "minabs_K",
            Statistic::MaxAbsK => "maxabs_K",
            Statistic::Sbar => "sbar",
            Statistic::OriginVisits => "origin_visits",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| OracleError::UnknownStatistic(s.to_string()))
    }
}

/// Exact law of a statistic over all `2^n` paths of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: u32,
    pub statistic: Statistic,
    /// value -> number of paths attaining it
    pub counts: BTreeMap<u64, u64>,
}

impl ExactDistribution {
    pub fn total_paths(&self) -> u64 {
        1u64 << self.n
    }

    pub fn mass(&self, value: u64) -> Dyadic {
        Dyadic::new(u128::from(*self.counts.get(&value).unwrap_or(&0)), self.n)
    }

    pub fn probability(&self, value: u64) -> f64 {
        self.mass(value).to_f64()
    }

    pub fn expectation(&self) -> Dyadic {
        let num = self
            .counts
            .iter()
            .map(|(&v, &c)| u128::from(v) * u128::from(c))
            .sum();
        Dyadic::new(num, self.n)
    }
}

const OFFSET: usize = MAX_ENUMERATION_LEN as usize;
const WIDTH: usize = 2 * OFFSET + 1;

/// One path's statistic by direct counting on fixed-size arrays.
fn path_statistic(bits: u64, n: u32, stat: Statistic) -> u64 {
    let mut xi = [0u64; WIDTH];
    let mut up = [0u64; WIDTH];
    let mut down = [0u64; WIDTH];
    let mut pos = OFFSET;
    let (mut lo, mut hi) = (pos, pos);
    xi[pos] = 1;
    for i in 0..n {
        if (bits >> i) & 1 == 1 {
            pos += 1;
            up[pos] += 1;
        } else {
            pos -= 1;
            down[pos] += 1;
        }
        xi[pos] += 1;
        lo = lo.min(pos);
        hi = hi.max(pos);
    }
    let abs = |i: usize| (i as i64 - OFFSET as i64).unsigned_abs();
    let sites = lo..=hi;
    let edges = lo + 1..=hi;
    let edge = |i: usize| up[i] + down[i - 1];
    let argmax = |range: std::ops::RangeInclusive<usize>, f: &dyn Fn(usize) -> u64| {
        let max = range.clone().map(f).max().unwrap_or(0);
        let members: Vec<usize> = range.filter(|&i| f(i) == max).collect();
        (max, members)
    };
    let minmax_abs = |m: &[usize]| {
        let it = m.iter().map(|&i| abs(i));
        (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
    };
    match stat {
        Statistic::CardK => argmax(sites, &|i| xi[i]).1.len() as u64,
        Statistic::CardE => argmax(edges, &edge).1.len() as u64,
        Statistic::CardKD => argmax(sites, &|i| down[i]).1.len() as u64,
        Statistic::XiStar => argmax(sites, &|i| xi[i]).0,
        Statistic::LStar => argmax(edges, &edge).0,
        Statistic::MinAbsE => minmax_abs(&argmax(edges, &edge).1).0,
        Statistic::MaxAbsE => minmax_abs(&argmax(edges, &edge).1).1,
        Statistic::MinAbsK => minmax_abs(&argmax(sites, &|i| xi[i]).1).0,
        Statistic::MaxAbsK => minmax_abs(&argmax(sites, &|i| xi[i]).1).1,
        Statistic::Sbar => (hi - OFFSET) as u64,
        Statistic::OriginVisits => xi[OFFSET],
    }
}

const BLOCK: u64 = 1 << 14;

/// Exact distribution of `stat` over all paths of length `n`.
///
/// Paths are folded in blocks (in parallel when a pool is available) and
/// merged by integer addition, so the result does not depend on the split.
pub fn enumerate_paths(n: u32, stat: Statistic) -> Result<ExactDistribution, OracleError> {
    if n > MAX_ENUMERATION_LEN {
        return Err(OracleError::TooLong(n));
    }
    let total = 1u64 << n;
    let blocks = total.div_ceil(BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut local = BTreeMap::new();
            for bits in b * BLOCK..((b + 1) * BLOCK).min(total) {
                *local.entry(path_statistic(bits, n, stat)).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(ExactDistribution {
        n,
        statistic: stat,
        counts,
    })
}

/// What a verification check compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Field(FieldInvariant),
    CountsMatchOracle,
    SitesMatchOracle,
    EdgesMatchOracle,
    DowncrossMatchOracle,
    EdgeDowncrossLemma,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Field(i) => write!(f, "{i}"),
            Check::CountsMatchOracle => f.write_str("counts_match_oracle"),
            Check::SitesMatchOracle => f.write_str("favorite_sites_match_oracle"),
            Check::EdgesMatchOracle => f.write_str("favorite_edges_match_oracle"),
            Check::DowncrossMatchOracle => f.write_str("favorite_downcross_match_oracle"),
            Check::EdgeDowncrossLemma => f.write_str("edge_downcross_lemma"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// Index of the path within the run.
    pub path: u64,
    /// Length of the failing prefix.
    pub prefix: u64,
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub paths: u64,
    pub prefixes_checked: u64,
    pub oracle_comparisons: u64,
    pub lemma_checks: u64,
    /// Prefixes skipped for the lemma because no down step had occurred.
    pub degenerate_skipped: u64,
    pub failures: u64,
    pub first_failure: Option<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, path: u64, prefix: u64, check: Check) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(Failure {
                path,
                prefix,
                check,
            });
        }
    }

    pub fn merge(&mut self, other: VerifyReport) {
        self.paths += other.paths;
        self.prefixes_checked += other.prefixes_checked;
        self.oracle_comparisons += other.oracle_comparisons;
        self.lemma_checks += other.lemma_checks;
        self.degenerate_skipped += other.degenerate_skipped;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

/// Field invariants and the edge/downcross lemma on the walker's current
/// state.
fn check_state(report: &mut VerifyReport, walker: &Walker, path: u64) {
    let prefix = walker.n();
    report.prefixes_checked += 1;
    if let Err(inv) = walker.field().check_invariants() {
        report.fail(path, prefix, Check::Field(inv));
    }
    let fav = walker.favorites();
    if prefix >= 1 && !fav.downcross_degenerate() {
        report.lemma_checks += 1;
        if !fav.check_edge_downcross_lemma() {
            report.fail(path, prefix, Check::EdgeDowncrossLemma);
        }
    } else if prefix >= 1 {
        report.degenerate_skipped += 1;
    }
}

/// Compares the walker with the brute-force recomputation of prefix `m`.
fn compare_with_oracle(
    report: &mut VerifyReport,
    walker: &Walker,
    recorded: &RecordedPath,
    path: u64,
) {
    let m = walker.n() as usize;
    report.oracle_comparisons += 1;
    let field = brute_local_times(recorded, m).expect("prefix within path");
    if !walker.field().same_counts(&field) {
        report.fail(path, m as u64, Check::CountsMatchOracle);
    }
    let fav = brute_favorites(recorded, m).expect("prefix within path");
    let mine = walker.favorites();
    if (mine.sites.max_value(), mine.favorite_sites()) != (fav.sites.0, &fav.sites.1[..]) {
        report.fail(path, m as u64, Check::SitesMatchOracle);
    }
    if (mine.edges.max_value(), mine.favorite_edges()) != (fav.edges.0, &fav.edges.1[..]) {
        report.fail(path, m as u64, Check::EdgesMatchOracle);
    }
    if (mine.downcross.max_value(), mine.favorite_downcross())
        != (fav.downcross.0, &fav.downcross.1[..])
    {
        report.fail(path, m as u64, Check::DowncrossMatchOracle);
    }
}

/// Every prefix of `path`: incremental state against the oracle, field
/// invariants, and the lemma on non-degenerate prefixes.
pub fn verify_invariants(path: &RecordedPath) -> VerifyReport {
    verify_path_with(path, 0, |_, _| {})
}

/// As [`verify_invariants`], calling `hook(prefix, walker)` after each step
/// and before the checks. Tests use the hook to inject faults.
pub fn verify_path_with<F>(path: &RecordedPath, path_index: u64, mut hook: F) -> VerifyReport
where
    F: FnMut(u64, &mut Walker),
{
    let mut report = VerifyReport {
        paths: 1,
        ..Default::default()
    };
    let mut walker = Walker::new();
    hook(0, &mut walker);
    compare_with_oracle(&mut report, &walker, path, path_index);
    check_state(&mut report, &walker, path_index);
    for (k, &s) in path.steps.iter().enumerate() {
        walker.step(s);
        hook(k as u64 + 1, &mut walker);
        compare_with_oracle(&mut report, &walker, path, path_index);
        check_state(&mut report, &walker, path_index);
    }
    report
}

/// All `2^n` paths of length `n`, every prefix.
pub fn verify_exhaustive(n: u32) -> Result<VerifyReport, OracleError> {
    if n > MAX_ENUMERATION_LEN {
        return Err(OracleError::TooLong(n));
    }
    Ok((0..1u64 << n)
        .into_par_iter()
        .map(|bits| verify_invariants_indexed(bits, n))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(VerifyReport::default(), |mut acc, r| {
            acc.merge(r);
            acc
        }))
}

fn verify_invariants_indexed(bits: u64, n: u32) -> VerifyReport {
    verify_path_with(&RecordedPath::from_bits(bits, n), bits, |_, _| {})
}

/// Lemma-only exhaustive check, cheaper than [`verify_exhaustive`]: no
/// oracle recomputation, just the lemma on each non-degenerate prefix.
pub fn verify_lemma_exhaustive(n: u32) -> Result<VerifyReport, OracleError> {
    if n > MAX_ENUMERATION_LEN {
        return Err(OracleError::TooLong(n));
    }
    Ok((0..1u64 << n)
        .into_par_iter()
        .map(|bits| {
            let mut report = VerifyReport {
                paths: 1,
                ..Default::default()
            };
            let mut w = Walker::new();
            for i in 0..n {
                w.step(Step::from_bit(bits, i));
                check_state(&mut report, &w, bits);
            }
            report
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(VerifyReport::default(), |mut acc, r| {
            acc.merge(r);
            acc
        }))
}

/// Settings for verification on long random paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomVerify {
    pub paths: u64,
    pub length: u64,
    pub seed: u64,
    /// Random times per path at which invariants and the lemma are checked.
    pub check_times: u64,
    /// Random prefixes per path compared against the oracle; these require
    /// storing the path.
    pub oracle_prefixes: u64,
}

fn sample_times(rng: &mut ChaCha8Rng, count: u64, length: u64) -> Vec<u64> {
    let mut t: Vec<u64> = (0..count).map(|_| 1 + rng.next_u64() % length).collect();
    t.sort_unstable();
    t.dedup();
    t
}

/// Checks each random path at sampled times. Path `i` uses
/// `Seed { base_seed: seed, stream_id: i }`.
pub fn verify_random(cfg: &RandomVerify) -> VerifyReport {
    (0..cfg.paths)
        .into_par_iter()
        .map(|i| verify_random_path(cfg, i))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(VerifyReport::default(), |mut acc, r| {
            acc.merge(r);
            acc
        })
}

fn verify_random_path(cfg: &RandomVerify, i: u64) -> VerifyReport {
    let mut report = VerifyReport {
        paths: 1,
        ..Default::default()
    };
    if cfg.length == 0 {
        return report;
    }
    let mut sampler = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x005e_ed0f_7175);
    sampler.set_stream(i);
    let checks = sample_times(&mut sampler, cfg.check_times, cfg.length);
    let oracle_times = sample_times(&mut sampler, cfg.oracle_prefixes, cfg.length);

    let mut stream = StepStream::new(Seed::new(cfg.seed, i));
    let recorded = (!oracle_times.is_empty()).then(|| {
        let last = *oracle_times.last().unwrap();
        stream.clone().take_path(last as usize)
    });
    let mut walker = Walker::new();
    let (mut ci, mut oi) = (0, 0);
    for n in 1..=cfg.length {
        walker.step(stream.next_step());
        if ci < checks.len() && checks[ci] == n {
            ci += 1;
            check_state(&mut report, &walker, i);
        }
        if oi < oracle_times.len() && oracle_times[oi] == n {
            oi += 1;
            compare_with_oracle(&mut report, &walker, recorded.as_ref().unwrap(), i);
        }
        if ci == checks.len() && oi == oracle_times.len() {
            break;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_time::SiteCounts;

    fn path(v: &[i64]) -> RecordedPath {
        RecordedPath::from_values(v).unwrap()
    }

    #[test]
    fn brute_counts_by_hand() {
        let f = brute_local_times(&path(&[1, -1]), 2).unwrap();
        assert_eq!(f.site_count(0), 2);
        assert_eq!(f.site_count(1), 1);
        assert_eq!(f.upcross_count(1), 1);
        assert_eq!(f.downcross_count(0), 1);
        assert_eq!(f.edge_count(1), 2);
        let empty = brute_local_times(&path(&[1, -1]), 0).unwrap();
        assert_eq!(
            empty.counts(),
            &[SiteCounts {
                xi: 1,
                up: 0,
                down: 0
            }]
        );
        assert!(brute_local_times(&path(&[1]), 2).is_err());
    }

    #[test]
    fn brute_favorites_by_hand() {
        let f = brute_favorites(&path(&[1]), 1).unwrap();
        assert_eq!(f.edges, (1, vec![1]));
        assert_eq!(f.sites, (1, vec![0, 1]));
        assert_eq!(f.downcross, (0, vec![0, 1]));
        let f = brute_favorites(&path(&[1, -1]), 2).unwrap();
        assert_eq!(f.edges, (2, vec![1]));
        assert_eq!(f.sites, (2, vec![0]));
        assert_eq!(f.downcross, (1, vec![0]));
    }

    #[test]
    fn dyadic_ordering() {
        assert_eq!(Dyadic::new(2, 2), Dyadic::new(1, 1));
        assert!(Dyadic::new(3, 2) > Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(6, 3).to_string(), "3/4");
        assert_eq!(Dyadic::new(0, 9).to_string(), "0/1");
    }

    #[test]
    fn enumerate_two_steps() {
        // ++ and -- visit three sites once each; +- and -+ revisit 0.
        let k = enumerate_paths(2, Statistic::CardK).unwrap();
        assert_eq!(k.counts, BTreeMap::from([(1, 2), (3, 2)]));
        assert_eq!(k.mass(1), Dyadic::new(1, 1));
        // ++ and -- cross two edges once; +- and -+ cross one edge twice.
        let e = enumerate_paths(2, Statistic::CardE).unwrap();
        assert_eq!(e.counts, BTreeMap::from([(1, 2), (2, 2)]));
        let x = enumerate_paths(1, Statistic::XiStar).unwrap();
        assert_eq!(x.counts, BTreeMap::from([(1, 2)]));
        assert!(enumerate_paths(25, Statistic::XiStar).is_err());
    }

    #[test]
    fn enumeration_matches_tracker() {
        // The tracker-derived statistic agrees with the oracle law at n = 10.
        let n = 10;
        for stat in Statistic::ALL {
            let dist = enumerate_paths(n, stat).unwrap();
            let mut counts = BTreeMap::new();
            for bits in 0..1u64 << n {
                let mut w = Walker::new();
                for i in 0..n {
                    w.step(Step::from_bit(bits, i));
                }
                let f = w.favorites();
                let ext = |m: &[i64]| crate::favorites::extremal_abs(m).unwrap();
                let v = match stat {
                    Statistic::CardK => f.sites.len() as u64,
                    Statistic::CardE => f.edges.len() as u64,
                    Statistic::CardKD => f.downcross.len() as u64,
                    Statistic::XiStar => f.sites.max_value(),
                    Statistic::LStar => f.edges.max_value(),
                    Statistic::MinAbsE => ext(f.favorite_edges()).0,
                    Statistic::MaxAbsE => ext(f.favorite_edges()).1,
                    Statistic::MinAbsK => ext(f.favorite_sites()).0,
                    Statistic::MaxAbsK => ext(f.favorite_sites()).1,
                    Statistic::Sbar => w.field().hi() as u64,
                    Statistic::OriginVisits => w.field().site_count(0),
                };
                *counts.entry(v).or_insert(0u64) += 1;
            }
            assert_eq!(dist.counts, counts, "{stat}");
        }
    }

    #[test]
    fn statistic_names_parse() {
        for s in Statistic::ALL {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("bogus".parse::<Statistic>().is_err());
    }

    #[test]
    fn adversarial_path_passes() {
        let r = verify_invariants(&path(&[1, 1, -1, -1, -1, 1]));
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.prefixes_checked, 7);
        assert_eq!(r.degenerate_skipped, 2);
    }

    #[test]
    fn fault_injection_is_caught_at_first_divergent_prefix() {
        let p = StepStream::new(Seed::new(9, 9)).take_path(40);
        let target = 17u64;
        let r = verify_path_with(&p, 0, |k, w| {
            if k == target {
                let (field, _) = w.parts_mut();
                let x = field.position();
                let mut c = SiteCounts {
                    xi: field.site_count(x),
                    up: field.upcross_count(x),
                    down: field.downcross_count(x),
                };
                c.xi += 1;
                field.corrupt_site(x, c);
            }
        });
        assert!(!r.passed());
        assert_eq!(r.first_failure.as_ref().unwrap().prefix, target);
    }

    #[test]
    fn fault_in_favorites_is_caught() {
        let p = StepStream::new(Seed::new(2, 0)).take_path(30);
        let r = verify_path_with(&p, 0, |k, w| {
            if k == 12 {
                let (_, fav) = w.parts_mut();
                fav.edges.offer(1000, fav.edges.max_value());
            }
        });
        let first = r.first_failure.unwrap();
        assert_eq!(first.prefix, 12);
        assert_eq!(first.check, Check::EdgesMatchOracle);
    }

    #[test]
    fn exhaustive_small() {
        let r = verify_exhaustive(8).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.paths, 256);
        assert_eq!(r.prefixes_checked, 256 * 9);
    }

    #[test]
    fn random_paths_pass() {
        let r = verify_random(&RandomVerify {
            paths: 3,
            length: 20_000,
            seed: 7,
            check_times: 200,
            oracle_prefixes: 3,
        });
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.oracle_comparisons, 9);
    }
}
