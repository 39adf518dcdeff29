//! Seeded ±1 step streams and walk-state advancement.
//!
//! Every replica owns one [`StepStream`]. Streams are ChaCha8 keyed by the
//! base seed, with the replica index selecting one of the 2^64 disjoint
//! ChaCha streams, so substreams never share generator state.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifies one reproducible step sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed {
    pub base_seed: u64,
    pub stream_id: u64,
}

impl Seed {
    pub fn new(base_seed: u64, stream_id: u64) -> Self {
        Self {
            base_seed,
            stream_id,
        }
    }
}

/// One step of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Up,
    Down,
}

impl Step {
    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Down => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Step> {
        match v {
            1 => Some(Step::Up),
            -1 => Some(Step::Down),
            _ => None,
        }
    }

    /// Decodes bit `i` of `bits` (set = up). Used to index all paths of a
    /// given length by an integer.
    #[inline]
    pub fn from_bit(bits: u64, i: u32) -> Step {
        if (bits >> i) & 1 == 1 {
            Step::Up
        } else {
            Step::Down
        }
    }
}

/// Deterministic infinite stream of steps.
#[derive(Debug, Clone)]
pub struct StepStream {
    rng: ChaCha8Rng,
}

impl StepStream {
    pub fn new(seed: Seed) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.base_seed);
        rng.set_stream(seed.stream_id);
        Self { rng }
    }

    /// Draws one step from the top bit of the next generator word.
    #[inline]
    pub fn next_step(&mut self) -> Step {
        if self.rng.next_u64() >> 63 == 1 {
            Step::Up
        } else {
            Step::Down
        }
    }

    pub fn take_path(&mut self, len: usize) -> RecordedPath {
        RecordedPath {
            steps: (0..len).map(|_| self.next_step()).collect(),
        }
    }
}

impl Iterator for StepStream {
    type Item = Step;

    #[inline]
    fn next(&mut self) -> Option<Step> {
        Some(self.next_step())
    }
}

/// Time and position of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WalkState {
    pub n: u64,
    pub position: i64,
}

impl WalkState {
    pub const ORIGIN: WalkState = WalkState { n: 0, position: 0 };

    #[inline]
    pub fn advance(self, step: Step) -> WalkState {
        WalkState {
            n: self.n + 1,
            position: self.position + step.value(),
        }
    }
}

/// A stored step sequence. Only built for oracle verification runs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecordedPath {
    pub steps: Vec<Step>,
}

impl RecordedPath {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    /// Builds a path from ±1 values; `None` if any value is not ±1.
    pub fn from_values(values: &[i64]) -> Option<Self> {
        values
            .iter()
            .map(|&v| Step::from_value(v))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    /// The `len`-step path whose step `i` is up iff bit `i` of `bits` is set.
    pub fn from_bits(bits: u64, len: u32) -> Self {
        Self::new((0..len).map(|i| Step::from_bit(bits, i)).collect())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// S_0, S_1, ..., S_len.
    pub fn positions(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut s = 0i64;
        out.push(s);
        for step in &self.steps {
            s += step.value();
            out.push(s);
        }
        out
    }

    pub fn to_sign_string(&self) -> String {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Up => '+',
                Step::Down => '-',
            })
            .collect()
    }

    pub fn from_sign_string(s: &str) -> Option<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '+' => Some(Step::Up),
                '-' => Some(Step::Down),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }
}
