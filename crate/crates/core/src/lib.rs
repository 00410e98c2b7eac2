//! Local search for (d,k)-CSP over color-graph distances.
//!
//! The crate solves constraint satisfaction formulas whose constraints are
//! disjunctions of at most `k` literals `(x != c)` over `d` colors, with
//!
//! - a randomized walk that recolors a variable of a falsified constraint,
//! - a deterministic solver that covers `[d]^n` with balls and searches
//!   each ball recursively.
//!
//! Both measure distance through a graph on the colors. The complete graph
//! gives Hamming distance; the directed cycle gives a skewed distance whose
//! balls are searched with branching factor `k` instead of `k (d - 1)`.
//! The [`analysis`] and [`volume`] modules compute the resulting
//! per-variable running-time bases exactly.

pub mod analysis;
pub mod colorgraph;
pub mod covercode;
pub mod formula;
pub mod search;
pub mod volume;

pub use colorgraph::{assignment_distance, ColorGraph, DistanceProfile, GraphKind};
pub use covercode::{build_code, verify_cover, CoveringCode};
pub use formula::{brute_force_solve, parse_instance, serialize_instance, Assignment, Formula};
pub use search::{det_solve, g_searchball, schoening_solve, Outcome, SearchStats, SolveResult};
