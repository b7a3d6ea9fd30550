//! Incremental and offline approximate shortest paths on sparse weighted digraphs.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides:
//!
//! - [`graph`]: the dynamic digraph with per-edge weight histories, update
//!   sequences, decrease filtering and seeded instance generation;
//! - [`propagate`]: the estimate vector and the slack-respecting Dijkstra-like
//!   propagation kernel shared by the online structures;
//! - [`sssp`]: incremental SSSP under source-edge insertions with ranks,
//!   synchronization, batch insertion with a rank offset and both resets;
//! - [`dense`]: a small dense all-pairs structure used on phase graphs;
//! - [`apsp`]: the phase-based incremental APSP composition with shortcut edges;
//! - [`offline`]: the offline incremental SSSP structure answering per-version
//!   queries;
//! - [`oracle`]: exact recomputation, certification checks, replay
//!   verification and an adaptive adversary.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod apsp;
pub mod dense;
pub mod graph;
pub mod offline;
pub mod oracle;
pub mod propagate;
pub mod sssp;

mod heap;
mod math;

pub use graph::{DynGraph, EdgeId, GraphError, Instance, Op, Update, UpdateKind, UpdateSequence, VertexId, Weight};

/// Smallest accuracy parameter accepted by the online structures.
///
/// Multiplicative guards are evaluated with plain floating-point comparisons;
/// this floor keeps the slack far above rounding error.
pub const MIN_XI: f64 = 1.0 / (1u64 << 20) as f64;
