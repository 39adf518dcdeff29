//! Favorite sites, favorite edges and favorite downcrossing sites of the
//! one-dimensional simple symmetric random walk.
//!
//! - [`path`]: seeded step streams and walk states
//! - [`local_time`]: site visits and directed edge crossings
//! - [`favorites`]: exact argmax sets maintained step by step
//! - [`stats`]: checkpoint functionals, schedules, inverse local times
//! - [`oracle`]: brute-force recomputation and exhaustive enumeration

pub mod favorites;
pub mod local_time;
pub mod oracle;
pub mod path;
pub mod stats;

pub use favorites::{extremal_abs, ArgmaxSet, FavoritesState, Walker};
pub use local_time::{CountField, FieldInvariant, SiteCounts, StepError, Touched};
pub use path::{RecordedPath, Seed, Step, StepStream, WalkState};
pub use stats::{CheckpointRecord, ScheduleKind, ScheduleSpec};
