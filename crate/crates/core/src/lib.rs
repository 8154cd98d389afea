//! Desk-scale computable equivalence structures.
//!
//! Structures are presented in stages: a [`Presentation`] is a trace of
//! element-introduction events, and replaying a prefix of the trace gives the
//! finite [`Snapshot`] at that stage. On top of that data model the crate
//! provides
//!
//! - [`approx`]: clocked partial functions and stage approximations with
//!   Σ₂ / Π₂ / limit / monotone-limit semantics,
//! - [`embed`]: embedding synthesis at the computable, Δ₂ and Δ₃ levels plus
//!   exact verification and a brute-force embeddability oracle,
//! - [`adversary`]: stage constructions that diagonalize against clocked
//!   programs and approximation families,
//! - [`indexsets`]: reduction gadgets that turn approximations into
//!   presentations, the bi-embeddability test and the degree classifier.
//!
//! Every construction is horizon-truncated and deterministic.

pub mod adversary;
pub mod approx;
pub mod embed;
pub mod indexsets;
pub mod pairing;
pub mod presentation;
pub mod profile;
pub mod snapshot;
pub mod text;

pub use presentation::{Event, EventKind, Presentation, PresentationBuilder, PresentationError};
pub use profile::{Bound, CharacterProfile, Count};
pub use snapshot::{Census, EquivalenceView, Snapshot, SnapshotError};

/// Element ids are natural numbers.
pub type Element = u64;

/// Stage index of a construction.
pub type Stage = u64;
