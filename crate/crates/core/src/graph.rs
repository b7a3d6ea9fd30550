//! Dynamic weighted digraph, update sequences and instance generation.
//!
//! Edges are never deleted. Every edge record keeps its full weight history
//! so that any past version `G^t` can be reconstructed with
//! [`DynGraph::weight_at`]. Timestamps are global update indices: the initial
//! graph is version 0 and the `i`-th update produces version `i`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::math;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("weight {weight} is outside {{0}} ∪ [1, W]")]
    InvalidWeight { weight: Weight },
    #[error("no edge {tail}->{head} to decrease")]
    MissingEdge { tail: VertexId, head: VertexId },
    #[error("decrease of {tail}->{head} to {requested} does not lower current weight {current}")]
    NotADecrease {
        tail: VertexId,
        head: VertexId,
        current: Weight,
        requested: Weight,
    },
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateKind {
    Insert,
    Decrease,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Update {
    pub kind: UpdateKind,
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: Weight,
}

impl Update {
    pub fn insert(tail: VertexId, head: VertexId, weight: Weight) -> Self {
        Self { kind: UpdateKind::Insert, tail, head, weight }
    }

    pub fn decrease(tail: VertexId, head: VertexId, weight: Weight) -> Self {
        Self { kind: UpdateKind::Decrease, tail, head, weight }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateSequence {
    pub updates: Vec<Update>,
}

impl UpdateSequence {
    pub fn new(updates: Vec<Update>) -> Self {
        Self { updates }
    }

    /// Number of updates, `Δ`.
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Update> {
        self.updates.iter()
    }
}

/// One line of an instance after the initial edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Update(Update),
    /// All-pairs query `(u, v)`.
    Pair(VertexId, VertexId),
    /// Single-source query for `v`.
    Source(VertexId),
    /// Offline query for `v` at version `t`.
    Offline(VertexId, usize),
}

/// An initial graph plus an interleaved stream of updates and queries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub initial: Vec<(VertexId, VertexId, Weight)>,
    pub ops: Vec<Op>,
}

impl Instance {
    pub fn base_graph(&self) -> Result<DynGraph, GraphError> {
        DynGraph::with_edges(self.n, &self.initial)
    }

    pub fn updates(&self) -> UpdateSequence {
        UpdateSequence::new(
            self.ops
                .iter()
                .filter_map(|op| match op {
                    Op::Update(u) => Some(*u),
                    _ => None,
                })
                .collect(),
        )
    }

    pub fn from_parts(graph: &DynGraph, seq: &UpdateSequence) -> Self {
        Self {
            n: graph.vertex_count(),
            initial: graph
                .edges()
                .iter()
                .map(|e| (e.tail, e.head, e.weight()))
                .collect(),
            ops: seq.iter().map(|u| Op::Update(*u)).collect(),
        }
    }

    /// Largest weight mentioned anywhere in the instance, at least 1.
    pub fn max_weight(&self) -> Weight {
        let init = self.initial.iter().map(|e| e.2);
        let ups = self.ops.iter().filter_map(|op| match op {
            Op::Update(u) => Some(u.weight),
            _ => None,
        });
        init.chain(ups).fold(1.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub tail: VertexId,
    pub head: VertexId,
    /// `(timestamp, weight)` pairs, timestamps strictly increasing and
    /// weights strictly decreasing.
    pub history: Vec<(u64, Weight)>,
}

impl EdgeRecord {
    /// Current weight: the last history entry.
    #[inline]
    pub fn weight(&self) -> Weight {
        self.history[self.history.len() - 1].1
    }

    pub fn inserted_at(&self) -> u64 {
        self.history[0].0
    }

    /// Weight in version `t`, or `None` if the edge did not exist yet.
    pub fn weight_at(&self, t: u64) -> Option<Weight> {
        let idx = self.history.partition_point(|&(ts, _)| ts <= t);
        if idx == 0 {
            None
        } else {
            Some(self.history[idx - 1].1)
        }
    }
}

/// Checks `w ∈ {0} ∪ [1, max]` (`max` unbounded when `None`).
pub fn check_weight(w: Weight, max: Option<Weight>) -> Result<(), GraphError> {
    let in_domain = w.is_finite() && (w == 0.0 || w >= 1.0) && max.is_none_or(|m| w <= m);
    if in_domain {
        Ok(())
    } else {
        Err(GraphError::InvalidWeight { weight: w })
    }
}

/// Adjacency-list digraph with parallel edges and timestamped weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DynGraph {
    n: usize,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    edges: Vec<EdgeRecord>,
    current_time: u64,
    max_weight: Option<Weight>,
}

impl DynGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            edges: Vec::new(),
            current_time: 0,
            max_weight: None,
        }
    }

    pub fn with_edges(n: usize, edges: &[(VertexId, VertexId, Weight)]) -> Result<Self, GraphError> {
        let mut g = Self::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    /// Enforces an upper weight bound `W` on all later additions and updates.
    pub fn set_max_weight(&mut self, w: Option<Weight>) {
        self.max_weight = w;
    }

    pub fn max_weight(&self) -> Option<Weight> {
        self.max_weight
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn current_time(&self) -> u64 {
        self.current_time
    }

    #[inline]
    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> &EdgeRecord {
        &self.edges[e]
    }

    #[inline]
    pub fn out_edges(&self, u: VertexId) -> &[EdgeId] {
        &self.out_adj[u]
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_adj[v]
    }

    /// Largest current edge weight, at least 1.
    pub fn heaviest(&self) -> Weight {
        self.edges.iter().map(EdgeRecord::weight).fold(1.0, f64::max)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Adds an edge stamped with the current time without advancing it.
    /// Used to build the initial version.
    pub fn add_edge(&mut self, tail: VertexId, head: VertexId, w: Weight) -> Result<EdgeId, GraphError> {
        self.check_vertex(tail)?;
        self.check_vertex(head)?;
        check_weight(w, self.max_weight)?;
        let id = self.edges.len();
        self.edges.push(EdgeRecord { tail, head, history: vec![(self.current_time, w)] });
        self.out_adj[tail].push(id);
        self.in_adj[head].push(id);
        Ok(id)
    }

    /// The minimum-weight parallel edge `tail -> head`, if any.
    pub fn min_parallel_edge(&self, tail: VertexId, head: VertexId) -> Option<EdgeId> {
        self.out_adj
            .get(tail)?
            .iter()
            .copied()
            .filter(|&e| self.edges[e].head == head)
            .min_by(|&a, &b| self.edges[a].weight().total_cmp(&self.edges[b].weight()))
    }

    /// Current weight of the cheapest `tail -> head` edge.
    pub fn pair_weight(&self, tail: VertexId, head: VertexId) -> Option<Weight> {
        self.min_parallel_edge(tail, head).map(|e| self.edges[e].weight())
    }

    /// Applies one update as version `current_time + 1`.
    ///
    /// A decrease targets the minimum-weight parallel edge and must strictly
    /// lower it. On error the graph is left untouched.
    pub fn apply_update(&mut self, u: &Update) -> Result<EdgeId, GraphError> {
        self.check_vertex(u.tail)?;
        self.check_vertex(u.head)?;
        check_weight(u.weight, self.max_weight)?;
        match u.kind {
            UpdateKind::Insert => {
                self.current_time += 1;
                let id = self.edges.len();
                self.edges.push(EdgeRecord {
                    tail: u.tail,
                    head: u.head,
                    history: vec![(self.current_time, u.weight)],
                });
                self.out_adj[u.tail].push(id);
                self.in_adj[u.head].push(id);
                Ok(id)
            }
            UpdateKind::Decrease => {
                let e = self
                    .min_parallel_edge(u.tail, u.head)
                    .ok_or(GraphError::MissingEdge { tail: u.tail, head: u.head })?;
                let current = self.edges[e].weight();
                if u.weight >= current {
                    return Err(GraphError::NotADecrease {
                        tail: u.tail,
                        head: u.head,
                        current,
                        requested: u.weight,
                    });
                }
                self.current_time += 1;
                self.edges[e].history.push((self.current_time, u.weight));
                Ok(e)
            }
        }
    }

    /// Weight of `e` in version `t`; `None` if `e` was inserted after `t`.
    pub fn weight_at(&self, e: EdgeId, t: u64) -> Option<Weight> {
        self.edges[e].weight_at(t)
    }

    /// Snapshot of version `t` as a fresh graph (history collapsed).
    pub fn version(&self, t: u64) -> DynGraph {
        let mut g = DynGraph::new(self.n);
        for rec in &self.edges {
            if let Some(w) = rec.weight_at(t) {
                // weights come from a validated history
                let id = g.edges.len();
                g.edges.push(EdgeRecord { tail: rec.tail, head: rec.head, history: vec![(0, w)] });
                g.out_adj[rec.tail].push(id);
                g.in_adj[rec.head].push(id);
            }
        }
        g
    }

    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::Invariant(msg));
        if self.out_adj.len() != self.n || self.in_adj.len() != self.n {
            return bad("adjacency arrays do not match vertex count".into());
        }
        let mut out_seen = vec![0usize; self.edges.len()];
        let mut in_seen = vec![0usize; self.edges.len()];
        for (u, list) in self.out_adj.iter().enumerate() {
            for &e in list {
                if e >= self.edges.len() || self.edges[e].tail != u {
                    return bad(alloc::format!("out-adjacency of {u} lists foreign edge {e}"));
                }
                out_seen[e] += 1;
            }
        }
        for (v, list) in self.in_adj.iter().enumerate() {
            for &e in list {
                if e >= self.edges.len() || self.edges[e].head != v {
                    return bad(alloc::format!("in-adjacency of {v} lists foreign edge {e}"));
                }
                in_seen[e] += 1;
            }
        }
        for (e, rec) in self.edges.iter().enumerate() {
            if out_seen[e] != 1 || in_seen[e] != 1 {
                return bad(alloc::format!("edge {e} not listed exactly once per direction"));
            }
            if rec.history.is_empty() {
                return bad(alloc::format!("edge {e} has empty history"));
            }
            for pair in rec.history.windows(2) {
                if pair[0].0 >= pair[1].0 || pair[0].1 <= pair[1].1 {
                    return bad(alloc::format!("edge {e} history not strictly monotone"));
                }
            }
            if rec.history[rec.history.len() - 1].0 > self.current_time {
                return bad(alloc::format!("edge {e} stamped in the future"));
            }
            for &(_, w) in &rec.history {
                if check_weight(w, self.max_weight).is_err() {
                    return bad(alloc::format!("edge {e} carries weight {w} outside the domain"));
                }
            }
        }
        Ok(())
    }

    pub fn forward(&self) -> GraphView<'_> {
        GraphView { graph: self, reversed: false }
    }

    pub fn reversed(&self) -> GraphView<'_> {
        GraphView { graph: self, reversed: true }
    }
}

/// Out-edge access used by every propagation and search routine.
pub trait OutEdges {
    fn vertex_count(&self) -> usize;
    fn out_degree(&self, u: VertexId) -> usize;
    fn for_each_out<F: FnMut(VertexId, Weight)>(&self, u: VertexId, f: F);

    /// Total number of edges visible through this view.
    fn edge_total(&self) -> usize {
        (0..self.vertex_count()).map(|u| self.out_degree(u)).sum()
    }
}

/// A graph seen either as stored or with every edge reversed.
#[derive(Clone, Copy, Debug)]
pub struct GraphView<'a> {
    pub graph: &'a DynGraph,
    pub reversed: bool,
}

impl OutEdges for GraphView<'_> {
    #[inline]
    fn vertex_count(&self) -> usize {
        self.graph.n
    }

    #[inline]
    fn out_degree(&self, u: VertexId) -> usize {
        if self.reversed {
            self.graph.in_adj[u].len()
        } else {
            self.graph.out_adj[u].len()
        }
    }

    #[inline]
    fn for_each_out<F: FnMut(VertexId, Weight)>(&self, u: VertexId, mut f: F) {
        if self.reversed {
            for &e in &self.graph.in_adj[u] {
                let r = &self.graph.edges[e];
                f(r.tail, r.weight());
            }
        } else {
            for &e in &self.graph.out_adj[u] {
                let r = &self.graph.edges[e];
                f(r.head, r.weight());
            }
        }
    }

    fn edge_total(&self) -> usize {
        self.graph.edges.len()
    }
}

impl OutEdges for DynGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn out_degree(&self, u: VertexId) -> usize {
        self.out_adj[u].len()
    }

    fn for_each_out<F: FnMut(VertexId, Weight)>(&self, u: VertexId, f: F) {
        self.forward().for_each_out(u, f)
    }

    fn edge_total(&self) -> usize {
        self.edges.len()
    }
}

/// Drops decreases that do not beat the recorded weight by a `1+ε` factor.
///
/// Recorded weights start from `base` and follow the kept updates only, so
/// at every time each pair's recorded minimum is within `1+ε` of the true
/// minimum. Inserts are always kept.
pub fn filter_decreases(base: &DynGraph, seq: &UpdateSequence, eps: f64) -> UpdateSequence {
    let mut recorded = base.clone();
    recorded.set_max_weight(None);
    let mut kept = Vec::with_capacity(seq.len());
    for u in seq.iter() {
        let keep = match u.kind {
            UpdateKind::Insert => true,
            UpdateKind::Decrease => recorded
                .pair_weight(u.tail, u.head)
                .is_some_and(|cur| u.weight * (1.0 + eps) < cur),
        };
        if keep && recorded.apply_update(u).is_ok() {
            kept.push(*u);
        }
    }
    UpdateSequence::new(kept)
}

fn random_weight(rng: &mut ChaCha8Rng, max_w: u64) -> Weight {
    // roughly one edge in twenty is free
    if rng.gen_range(0..20) == 0 {
        0.0
    } else {
        rng.gen_range(1..=max_w) as Weight
    }
}

/// A strictly smaller weight in the domain, below `current > 0`.
fn random_decrease(rng: &mut ChaCha8Rng, current: Weight) -> Weight {
    let top = math::ceil(current) as u64 - 1;
    if top < 1 || rng.gen_range(0..10) == 0 {
        0.0
    } else {
        rng.gen_range(1..=top) as Weight
    }
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (VertexId, VertexId) {
    let u = rng.gen_range(0..n);
    if n == 1 {
        return (u, u);
    }
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    (u, v)
}

/// Random base graph with `m` edges and integer weights in `{0} ∪ [1, W]`.
pub fn generate_random_graph(n: usize, m: usize, max_w: u64, rng: &mut ChaCha8Rng) -> DynGraph {
    let mut g = DynGraph::new(n);
    g.set_max_weight(Some(max_w as Weight));
    for _ in 0..m {
        let (u, v) = random_pair(rng, n);
        let w = random_weight(rng, max_w);
        g.add_edge(u, v, w).expect("generated edge is valid");
    }
    g
}

/// Seeded random instance: a base graph with `m` edges followed by `delta`
/// updates mixing inserts and valid decreases.
pub fn generate_random_sequence(
    n: usize,
    m: usize,
    max_w: u64,
    delta: usize,
    seed: u64,
) -> (DynGraph, UpdateSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = generate_random_graph(n, m, max_w, &mut rng);
    let mut g = base.clone();
    let mut updates = Vec::with_capacity(delta);
    while updates.len() < delta {
        let decrease = g.edge_count() > 0 && rng.gen_bool(0.5);
        let upd = if decrease {
            let e = rng.gen_range(0..g.edge_count());
            let (u, v) = (g.edge(e).tail, g.edge(e).head);
            let cur = g.pair_weight(u, v).expect("edge exists");
            if cur == 0.0 {
                continue;
            }
            Update::decrease(u, v, random_decrease(&mut rng, cur))
        } else {
            let (u, v) = random_pair(&mut rng, n);
            Update::insert(u, v, random_weight(&mut rng, max_w))
        };
        g.apply_update(&upd).expect("generated update is valid");
        updates.push(upd);
    }
    (base, UpdateSequence::new(updates))
}

/// Seeded instance whose updates all leave `source`: fresh source edges or
/// decreases of existing ones.
pub fn generate_source_sequence(
    n: usize,
    m: usize,
    max_w: u64,
    delta: usize,
    source: VertexId,
    seed: u64,
) -> (DynGraph, UpdateSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = generate_random_graph(n, m, max_w, &mut rng);
    let mut g = base.clone();
    let mut updates = Vec::with_capacity(delta);
    while updates.len() < delta {
        let v = rng.gen_range(0..n);
        if v == source && n > 1 {
            continue;
        }
        let upd = match g.pair_weight(source, v) {
            Some(cur) if cur > 0.0 && rng.gen_bool(0.5) => {
                Update::decrease(source, v, random_decrease(&mut rng, cur))
            }
            _ => Update::insert(source, v, random_weight(&mut rng, max_w)),
        };
        g.apply_update(&upd).expect("generated update is valid");
        updates.push(upd);
    }
    (base, UpdateSequence::new(updates))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_into_empty_graph() {
        let mut g = DynGraph::new(2);
        let e = g.apply_update(&Update::insert(0, 1, 5.0)).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge(e).weight(), 5.0);
        assert_eq!(g.current_time(), 1);
    }

    #[test]
    fn decrease_appends_history() {
        let mut g = DynGraph::with_edges(2, &[(0, 1, 5.0)]).unwrap();
        let e = g.apply_update(&Update::decrease(0, 1, 3.0)).unwrap();
        assert_eq!(g.edge(e).history, vec![(0, 5.0), (1, 3.0)]);
    }

    #[test]
    fn increase_is_rejected() {
        let mut g = DynGraph::with_edges(2, &[(0, 1, 5.0)]).unwrap();
        let err = g.apply_update(&Update::decrease(0, 1, 7.0)).unwrap_err();
        assert!(matches!(err, GraphError::NotADecrease { .. }));
        assert_eq!(g.current_time(), 0);
        let err = g.apply_update(&Update::decrease(1, 0, 1.0)).unwrap_err();
        assert_eq!(err, GraphError::MissingEdge { tail: 1, head: 0 });
    }

    #[test]
    fn weights_outside_domain_rejected() {
        let mut g = DynGraph::new(2);
        assert!(g.add_edge(0, 1, 0.5).is_err());
        assert!(g.add_edge(0, 1, -1.0).is_err());
        assert!(g.add_edge(0, 1, f64::NAN).is_err());
        assert!(g.add_edge(0, 2, 1.0).is_err());
        g.set_max_weight(Some(10.0));
        assert!(g.add_edge(0, 1, 11.0).is_err());
        assert!(g.add_edge(0, 1, 0.0).is_ok());
    }

    #[test]
    fn decrease_targets_lightest_parallel_edge() {
        let mut g = DynGraph::with_edges(2, &[(0, 1, 9.0), (0, 1, 4.0)]).unwrap();
        let e = g.apply_update(&Update::decrease(0, 1, 3.0)).unwrap();
        assert_eq!(e, 1);
        assert_eq!(g.edge(0).weight(), 9.0);
        // 5 beats the heavy copy but not the light one
        assert!(g.apply_update(&Update::decrease(0, 1, 5.0)).is_err());
    }

    #[test]
    fn weight_at_examples() {
        let rec = EdgeRecord { tail: 0, head: 1, history: vec![(3, 9.0), (7, 4.0)] };
        assert_eq!(rec.weight_at(5), Some(9.0));
        assert_eq!(rec.weight_at(2), None);
        assert_eq!(rec.weight_at(7), Some(4.0));
        assert_eq!(rec.weight_at(100), Some(4.0));
    }

    #[test]
    fn filter_examples() {
        let base = DynGraph::new(2);
        let seq = UpdateSequence::new(vec![Update::insert(0, 1, 8.0), Update::decrease(0, 1, 7.9)]);
        assert_eq!(filter_decreases(&base, &seq, 0.1).updates, vec![Update::insert(0, 1, 8.0)]);
        let seq = UpdateSequence::new(vec![Update::insert(0, 1, 8.0), Update::decrease(0, 1, 4.0)]);
        assert_eq!(filter_decreases(&base, &seq, 0.1), seq);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_random_sequence(4, 4, 10, 4, 1);
        let b = generate_random_sequence(4, 4, 10, 4, 1);
        assert_eq!(a, b);
        assert_eq!(a.1.len(), 4);
        let c = generate_source_sequence(8, 10, 10, 20, 0, 3);
        assert!(c.1.iter().all(|u| u.tail == 0));
    }

    #[test]
    fn generated_decreases_are_valid() {
        for seed in 0..20 {
            let (base, seq) = generate_random_sequence(6, 8, 10, 60, seed);
            let mut g = base.clone();
            for u in seq.iter() {
                g.apply_update(u).unwrap();
            }
            g.check_invariants().unwrap();
        }
    }

    #[test]
    fn version_snapshot_matches_history() {
        let (base, seq) = generate_random_sequence(5, 6, 10, 12, 11);
        let mut g = base.clone();
        let mut snapshots = vec![g.version(0)];
        for u in seq.iter() {
            g.apply_update(u).unwrap();
            snapshots.push(g.version(g.current_time()));
        }
        for (t, snap) in snapshots.iter().enumerate() {
            let expected: Vec<_> = (0..g.edge_count())
                .filter_map(|e| g.weight_at(e, t as u64).map(|w| (g.edge(e).tail, g.edge(e).head, w)))
                .collect();
            let got: Vec<_> = snap.edges().iter().map(|r| (r.tail, r.head, r.weight())).collect();
            assert_eq!(expected, got, "version {t}");
        }
    }
}
