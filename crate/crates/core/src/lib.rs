//! Quarter-turn index of a planar fixed point.
//!
//! The invariant of an orientation-preserving plane homeomorphism around an
//! isolated fixed point is a cyclic word over {↑, →, ↓, ←}: a canonical
//! decomposition of the Poincaré–Lefschetz index into quarter turns, one
//! hyperbolic, elliptic or indifferent sector per vertical-anchored window.
//!
//! The crate has three layers:
//!
//! * [`word`] — exact cyclic-word algebra: allowedness, partial indices,
//!   the symbolic index, sector types, petals;
//! * [`band`] / [`model`] — the eight explicit sector dynamics and their
//!   gluing into a model homeomorphism realizing any allowed word;
//! * [`dynamics`] / [`curve`] / [`pipeline`] — the numeric side: orbit
//!   fates, the winding-number index, free-arc decompositions of closed
//!   curves, and recovery of the word from a geodesic curve, cross-checked
//!   against the symbolic computation.

pub mod band;
pub mod config;
pub mod curve;
pub mod dynamics;
pub mod geom;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod word;

pub use config::Config;
pub use curve::ClosedCurve;
pub use geom::Point2;
pub use model::{build_model, ModelHomeo};
pub use pipeline::{recover_word, verify_sweep, verify_word};
pub use report::IndexReport;
pub use word::{symbolic_index, CyclicWord, Letter};
