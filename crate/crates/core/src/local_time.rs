//! Site local times and directed edge-crossing counts.
//!
//! Edge `x` is the bond between sites `x - 1` and `x`. For each site we keep
//! the visit count `xi`, the number of arrivals from below `up` (crossings of
//! edge `x` upwards) and the number of arrivals from above `down`. The edge
//! local time `L(x) = up(x) + down(x - 1)` is derived on demand.

use std::fmt;

use thiserror::Error;

use crate::path::Step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SiteCounts {
    pub xi: u64,
    pub up: u64,
    pub down: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("step from {prev} to {next} is not a unit step")]
    NotUnit { prev: i64, next: i64 },
    #[error("step starts at {prev} but the walk is at {position}")]
    WrongOrigin { prev: i64, position: i64 },
}

/// Which of the field's invariants failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldInvariant {
    /// Σ ξ(x,n) = n + 1
    SiteTotal,
    /// Σ L(x,n) = n
    EdgeTotal,
    /// ξ = ξ_U + ξ_D + 1{x=0}
    SiteDecomposition,
    /// up/down crossings of an edge alternate
    Alternation,
    /// zero outside the visited range; walk inside it
    Support,
}

impl FieldInvariant {
    pub fn label(self) -> &'static str {
        match self {
            FieldInvariant::SiteTotal => "I1_site_total",
            FieldInvariant::EdgeTotal => "I2_edge_total",
            FieldInvariant::SiteDecomposition => "I3_site_decomposition",
            FieldInvariant::Alternation => "I4_alternation",
            FieldInvariant::Support => "I5_support",
        }
    }
}

impl fmt::Display for FieldInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Indices whose counts changed on one step, with their new values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Touched {
    pub site: i64,
    pub site_count: u64,
    pub edge: i64,
    pub edge_count: u64,
    /// Set on down steps only.
    pub downcross: Option<(i64, u64)>,
    /// `site` was outside the visited range before this step.
    pub new_site: bool,
}

/// Dense, offset-indexed counts over the visited range.
#[derive(Clone, PartialEq, Eq)]
pub struct CountField {
    cells: Vec<SiteCounts>,
    /// Site stored in `cells[0]`.
    base: i64,
    lo: i64,
    hi: i64,
    n: u64,
    position: i64,
}

impl fmt::Debug for CountField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountField")
            .field("n", &self.n)
            .field("position", &self.position)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field(
                "cells",
                &&self.cells[self.index(self.lo)..=self.index(self.hi)],
            )
            .finish()
    }
}

impl Default for CountField {
    fn default() -> Self {
        Self::new()
    }
}

const INITIAL_HALF_WIDTH: i64 = 64;

impl CountField {
    /// Field at time 0: the origin has been visited once.
    pub fn new() -> Self {
        Self::with_half_width(INITIAL_HALF_WIDTH)
    }

    pub fn with_half_width(half: i64) -> Self {
        let half = half.max(1);
        let mut cells = vec![SiteCounts::default(); (2 * half + 1) as usize];
        cells[half as usize].xi = 1;
        Self {
            cells,
            base: -half,
            lo: 0,
            hi: 0,
            n: 0,
            position: 0,
        }
    }

    /// Assembles a field from explicit per-site counts over `[lo, hi]`.
    /// Used by the brute-force oracle; no invariant is checked here.
    pub fn from_counts(lo: i64, counts: Vec<SiteCounts>, n: u64, position: i64) -> Self {
        assert!(!counts.is_empty(), "range must contain the origin");
        let hi = lo + counts.len() as i64 - 1;
        Self {
            cells: counts,
            base: lo,
            lo,
            hi,
            n,
            position,
        }
    }

    /// Resets to time 0 without releasing storage.
    pub fn reset(&mut self) {
        self.cells
            .iter_mut()
            .for_each(|c| *c = SiteCounts::default());
        if !(self.base..self.base + self.cells.len() as i64).contains(&0) {
            *self = Self::new();
            return;
        }
        let i = self.index(0);
        self.cells[i].xi = 1;
        self.lo = 0;
        self.hi = 0;
        self.n = 0;
        self.position = 0;
    }

    #[inline]
    fn index(&self, x: i64) -> usize {
        (x - self.base) as usize
    }

    #[inline]
    fn cell(&self, x: i64) -> SiteCounts {
        if x < self.lo || x > self.hi {
            SiteCounts::default()
        } else {
            self.cells[self.index(x)]
        }
    }

    #[cold]
    fn grow_to(&mut self, x: i64) {
        let len = self.cells.len() as i64;
        let extra = len.max(x.abs_diff(self.base).min(u32::MAX as u64) as i64);
        let (new_base, new_len) = if x < self.base {
            (self.base - extra, len + extra)
        } else {
            (self.base, len + extra)
        };
        let mut cells = vec![SiteCounts::default(); new_len as usize];
        let shift = (self.base - new_base) as usize;
        cells[shift..shift + self.cells.len()].copy_from_slice(&self.cells);
        self.cells = cells;
        self.base = new_base;
    }

    /// Records the move `prev -> next`, validating it.
    pub fn record_step(&mut self, prev: i64, next: i64) -> Result<Touched, StepError> {
        if prev != self.position {
            return Err(StepError::WrongOrigin {
                prev,
                position: self.position,
            });
        }
        let step = match next - prev {
            1 => Step::Up,
            -1 => Step::Down,
            _ => return Err(StepError::NotUnit { prev, next }),
        };
        Ok(self.step(step))
    }

    /// Hot-path variant of [`record_step`](Self::record_step).
    #[inline]
    pub fn step(&mut self, step: Step) -> Touched {
        let prev = self.position;
        let next = prev + step.value();
        let idx = next - self.base;
        if idx < 0 || idx >= self.cells.len() as i64 {
            self.grow_to(next);
        }
        let new_site = next < self.lo || next > self.hi;
        if next < self.lo {
            self.lo = next;
        } else if next > self.hi {
            self.hi = next;
        }
        self.n += 1;
        self.position = next;

        let i = self.index(next);
        match step {
            Step::Up => {
                let c = &mut self.cells[i];
                c.xi += 1;
                c.up += 1;
                let (site_count, up) = (c.xi, c.up);
                // edge `next` spans (prev, next); its down part sits at prev
                let down_below = self.cells[i - 1].down;
                Touched {
                    site: next,
                    site_count,
                    edge: next,
                    edge_count: up + down_below,
                    downcross: None,
                    new_site,
                }
            }
            Step::Down => {
                let c = &mut self.cells[i];
                c.xi += 1;
                c.down += 1;
                let (site_count, down) = (c.xi, c.down);
                // edge `prev` spans (next, prev)
                let up_above = self.cells[i + 1].up;
                Touched {
                    site: next,
                    site_count,
                    edge: prev,
                    edge_count: up_above + down,
                    downcross: Some((next, down)),
                    new_site,
                }
            }
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    /// Lowest visited site.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest visited site, i.e. the running maximum of the walk.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// ξ(x,n)
    #[inline]
    pub fn site_count(&self, x: i64) -> u64 {
        self.cell(x).xi
    }

    /// ξ_U(x,n): upward crossings of edge x.
    #[inline]
    pub fn upcross_count(&self, x: i64) -> u64 {
        self.cell(x).up
    }

    /// ξ_D(x,n): arrivals at x from x + 1.
    #[inline]
    pub fn downcross_count(&self, x: i64) -> u64 {
        self.cell(x).down
    }

    /// L(x,n): traversals of edge x in either direction.
    #[inline]
    pub fn edge_count(&self, x: i64) -> u64 {
        self.cell(x).up + self.cell(x - 1).down
    }

    /// Every traversed edge lies in `lo + 1 ..= hi`.
    pub fn edge_range(&self) -> std::ops::RangeInclusive<i64> {
        self.lo + 1..=self.hi
    }

    pub fn site_range(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    /// Maximum of L over edges with |x| <= radius (0 if none traversed).
    pub fn max_edge_count_within(&self, radius: u64) -> u64 {
        let r = radius.min(i64::MAX as u64) as i64;
        let from = (self.lo + 1).max(-r);
        let to = self.hi.min(r);
        (from..=to).map(|x| self.edge_count(x)).max().unwrap_or(0)
    }

    /// Checks all five field invariants, returning the first that fails.
    pub fn check_invariants(&self) -> Result<(), FieldInvariant> {
        if !(self.lo..=self.hi).contains(&self.position) || self.lo > 0 || self.hi < 0 {
            return Err(FieldInvariant::Support);
        }
        let outside = self
            .cells
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let x = self.base + *i as i64;
                x < self.lo || x > self.hi
            })
            .any(|(_, c)| *c != SiteCounts::default());
        if outside {
            return Err(FieldInvariant::Support);
        }
        let mut site_total = 0u64;
        for x in self.site_range() {
            let c = self.cell(x);
            site_total += c.xi;
            if c.xi != c.up + c.down + u64::from(x == 0) {
                return Err(FieldInvariant::SiteDecomposition);
            }
        }
        if site_total != self.n + 1 {
            return Err(FieldInvariant::SiteTotal);
        }
        let mut edge_total = 0u64;
        for x in self.edge_range() {
            edge_total += self.edge_count(x);
            let up = self.upcross_count(x) as i128;
            let down = self.downcross_count(x - 1) as i128;
            let ok = if x >= 1 {
                up - down == i128::from(self.position >= x)
            } else {
                down - up == i128::from(self.position < x)
            };
            if !ok {
                return Err(FieldInvariant::Alternation);
            }
        }
        if edge_total != self.n {
            return Err(FieldInvariant::EdgeTotal);
        }
        Ok(())
    }

    /// Overwrites the counts at one site. Only meant for fault-injection
    /// tests of the verification harness.
    #[doc(hidden)]
    pub fn corrupt_site(&mut self, x: i64, counts: SiteCounts) {
        if x < self.lo || x > self.hi {
            return;
        }
        let i = self.index(x);
        self.cells[i] = counts;
    }

    /// Per-site counts over `[lo, hi]`.
    pub fn counts(&self) -> &[SiteCounts] {
        &self.cells[self.index(self.lo)..=self.index(self.hi)]
    }

    /// Structural equality of the observable field (range, time, position,
    /// counts), ignoring storage layout.
    pub fn same_counts(&self, other: &CountField) -> bool {
        self.n == other.n
            && self.position == other.position
            && self.lo == other.lo
            && self.hi == other.hi
            && self.counts() == other.counts()
    }
}
