//! Favorite sites, favorite edges and favorite downcrossing sites.
//!
//! Counts only ever grow by one at a time, so each argmax set can be kept
//! exact with a single comparison per touched index: a value above the
//! current maximum collapses the set to that index, a value equal to it
//! joins the set, anything below is ignored.

use smallvec::SmallVec;
use thiserror::Error;

use crate::local_time::{CountField, Touched};
use crate::path::{Step, WalkState};

pub type Members = SmallVec<[i64; 4]>;

/// Maximum of one local-time family and the indices attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArgmaxSet {
    max_value: u64,
    /// Sorted ascending.
    members: Members,
}

impl ArgmaxSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(index: i64, value: u64) -> Self {
        let mut members = Members::new();
        members.push(index);
        Self {
            max_value: value,
            members,
        }
    }

    pub fn from_parts(max_value: u64, mut members: Vec<i64>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self {
            max_value,
            members: members.into(),
        }
    }

    /// Reports that `index` now has count `value`.
    #[inline]
    pub fn offer(&mut self, index: i64, value: u64) {
        if value < self.max_value {
            return;
        }
        if value > self.max_value {
            self.max_value = value;
            self.members.clear();
            self.members.push(index);
        } else if let Err(pos) = self.members.binary_search(&index) {
            self.members.insert(pos, index);
        }
    }

    pub fn max_value(&self) -> u64 {
        self.max_value
    }

    pub fn members(&self) -> &[i64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: i64) -> bool {
        self.members.binary_search(&index).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("extremal |x| of an empty set")]
pub struct EmptySetError;

/// (min |x|, max |x|) over a set of sites or edges.
pub fn extremal_abs(members: &[i64]) -> Result<(u64, u64), EmptySetError> {
    let mut it = members.iter().map(|x| x.unsigned_abs());
    let first = it.next().ok_or(EmptySetError)?;
    Ok(it.fold((first, first), |(lo, hi), a| (lo.min(a), hi.max(a))))
}

/// The three argmax sets 𝒦(n), ℰ(n) and 𝒦_D(n).
///
/// Before the first down step every downcrossing count is zero; the
/// downcrossing set then holds every visited site and is flagged
/// degenerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FavoritesState {
    pub sites: ArgmaxSet,
    pub edges: ArgmaxSet,
    pub downcross: ArgmaxSet,
}

impl Default for FavoritesState {
    fn default() -> Self {
        Self::new()
    }
}

impl FavoritesState {
    /// State at time 0: the origin is the only visited site.
    pub fn new() -> Self {
        Self {
            sites: ArgmaxSet::singleton(0, 1),
            edges: ArgmaxSet::empty(),
            downcross: ArgmaxSet::singleton(0, 0),
        }
    }

    #[inline]
    pub fn update_on_step(&mut self, t: &Touched) {
        self.sites.offer(t.site, t.site_count);
        self.edges.offer(t.edge, t.edge_count);
        match t.downcross {
            Some((x, v)) => self.downcross.offer(x, v),
            None if t.new_site => self.downcross.offer(t.site, 0),
            None => {}
        }
    }

    pub fn favorite_sites(&self) -> &[i64] {
        self.sites.members()
    }

    pub fn favorite_edges(&self) -> &[i64] {
        self.edges.members()
    }

    pub fn favorite_downcross(&self) -> &[i64] {
        self.downcross.members()
    }

    /// No down step has happened yet.
    pub fn downcross_degenerate(&self) -> bool {
        self.downcross.max_value() == 0
    }

    /// Every favorite edge `x` has `x - 1` among the favorite downcrossing
    /// sites.
    pub fn check_edge_downcross_lemma(&self) -> bool {
        self.edges
            .members()
            .iter()
            .all(|&x| self.downcross.contains(x - 1))
    }
}

/// A walk together with its count field and favorite sets.
#[derive(Debug, Clone, Default)]
pub struct Walker {
    field: CountField,
    favorites: FavoritesState,
}

impl Walker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        self.field.reset();
        self.favorites = FavoritesState::new();
    }

    #[inline]
    pub fn step(&mut self, step: Step) -> Touched {
        let t = self.field.step(step);
        self.favorites.update_on_step(&t);
        t
    }

    pub fn n(&self) -> u64 {
        self.field.n()
    }

    pub fn position(&self) -> i64 {
        self.field.position()
    }

    pub fn state(&self) -> WalkState {
        WalkState {
            n: self.field.n(),
            position: self.field.position(),
        }
    }

    pub fn field(&self) -> &CountField {
        &self.field
    }

    pub fn favorites(&self) -> &FavoritesState {
        &self.favorites
    }

    /// Mutable access for fault-injection tests.
    #[doc(hidden)]
    pub fn parts_mut(&mut self) -> (&mut CountField, &mut FavoritesState) {
        (&mut self.field, &mut self.favorites)
    }
}
