//! Offline incremental SSSP over a known update sequence.
//!
//! Exact distances are computed for the first and last versions; a recursive
//! search over the version range then stores, for each vertex, estimates at
//! a few midpoint versions, but only for vertices whose stored bounds around
//! the range still differ by more than `1+ξ`. A query `(v, j)` returns the
//! smallest estimate stored for `v` at a version `≤ j`.
//!
//! Every vertex is treated as having an edge of weight `nW` from the source
//! at all versions, so stored values are always finite. Whether `v` is really
//! reachable at version `j` is answered from the first version at which it
//! became reachable.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{DynGraph, GraphError, OutEdges, UpdateKind, UpdateSequence, VertexId, Weight};
use crate::heap::MinQueue;
use crate::math;
use crate::propagate::dijkstra;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OfflineError {
    #[error("accuracy parameter {0} outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("version {j} outside [0, {delta}]")]
    VersionOutOfRange { j: usize, delta: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("malformed estimate collection: {0}")]
    Malformed(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-vertex estimates keyed by version, sorted by version.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateCollection {
    entries: Vec<(u64, f64)>,
}

impl EstimateCollection {
    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stores `est` for version `ts`; an existing entry keeps the smaller value.
    pub fn insert(&mut self, ts: u64, est: f64) {
        match self.entries.binary_search_by_key(&ts, |e| e.0) {
            Ok(i) => self.entries[i].1 = self.entries[i].1.min(est),
            Err(i) => self.entries.insert(i, (ts, est)),
        }
    }

    /// Smallest estimate at a version `≤ alpha`.
    pub fn prefix_min(&self, alpha: u64) -> Option<f64> {
        let end = self.entries.partition_point(|e| e.0 <= alpha);
        self.entries[..end].iter().map(|e| e.1).reduce(f64::min)
    }

    /// Largest estimate at a version `≥ beta`.
    pub fn suffix_max(&self, beta: u64) -> Option<f64> {
        let start = self.entries.partition_point(|e| e.0 < beta);
        self.entries[start..].iter().map(|e| e.1).reduce(f64::max)
    }
}

/// Serializable content of a built structure.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineParts {
    pub n: usize,
    pub delta: usize,
    pub xi: f64,
    pub source: VertexId,
    pub virtual_weight: f64,
    pub reach_time: Vec<Option<u64>>,
    pub collections: Vec<Vec<(u64, f64)>>,
}

#[derive(Debug, Clone)]
pub struct OfflineSssp {
    n: usize,
    delta: usize,
    xi: f64,
    source: VertexId,
    /// Weight `nW` of the implicit source edges.
    virtual_weight: f64,
    reach_time: Vec<Option<u64>>,
    coll: Vec<EstimateCollection>,
    costly: Vec<u32>,
    max_depth: u32,
    calls: u64,
    dijkstra_runs: u64,
}

/// Scratch space of the search.
struct Scratch {
    in_x: Vec<bool>,
    dist: Vec<f64>,
    queue: MinQueue,
}

impl OfflineSssp {
    /// Replays `seq` on `g0` and runs the search over versions `0..=Δ`.
    pub fn build(g0: &DynGraph, seq: &UpdateSequence, source: VertexId, eps: f64) -> Result<Self, OfflineError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(OfflineError::EpsilonOutOfRange(eps));
        }
        let n = g0.vertex_count();
        if source >= n {
            return Err(OfflineError::VertexOutOfRange(source));
        }
        let mut hist = DynGraph::new(n);
        for e in g0.edges() {
            hist.add_edge(e.tail, e.head, e.weight())?;
        }
        let reach_time = replay_reachability(&mut hist, seq, source)?;
        let delta = seq.len();
        let max_w = hist
            .edges()
            .iter()
            .flat_map(|e| e.history.iter().map(|h| h.1))
            .fold(1.0, f64::max);
        let virtual_weight = n as f64 * max_w;
        let xi = eps / (2.0 * math::log2(delta.max(1) as f64) + 2.0);
        let mut me = Self {
            n,
            delta,
            xi,
            source,
            virtual_weight,
            reach_time,
            coll: vec![EstimateCollection::default(); n],
            costly: vec![0; n],
            max_depth: 0,
            calls: 0,
            dijkstra_runs: 0,
        };
        let endpoints: &[u64] = if delta == 0 { &[0] } else { &[0, delta as u64] };
        for &t in endpoints {
            let snap = hist.version(t);
            let mut seeds = vec![(source, 0.0)];
            seeds.extend((0..n).filter(|&v| v != source).map(|v| (v, virtual_weight)));
            let d = dijkstra(&snap, &seeds);
            me.dijkstra_runs += 1;
            for (v, &dv) in d.iter().enumerate() {
                me.coll[v].insert(t, dv);
            }
        }
        let mut scratch = Scratch { in_x: vec![false; n], dist: vec![f64::INFINITY; n], queue: MinQueue::new() };
        let all: Vec<VertexId> = (0..n).collect();
        me.search(&hist, 0, delta as i64, &all, 0, &mut scratch);
        Ok(me)
    }

    fn search(&mut self, g: &DynGraph, alpha: i64, beta: i64, x0: &[VertexId], depth: u32, sc: &mut Scratch) {
        if alpha > beta {
            return;
        }
        self.calls += 1;
        self.max_depth = self.max_depth.max(depth);
        let (a, b) = (alpha as u64, beta as u64);
        let onep = 1.0 + self.xi;
        let x: Vec<VertexId> = x0
            .iter()
            .copied()
            .filter(|&u| {
                let lo = self.coll[u].prefix_min(a).unwrap_or(f64::INFINITY);
                let hi = self.coll[u].suffix_max(b).unwrap_or(0.0);
                lo > onep * hi
            })
            .collect();
        let gamma = (alpha + beta) / 2;
        if !x.is_empty() {
            self.costly_round(g, a, gamma as u64, &x, sc);
        }
        self.search(g, alpha, gamma - 1, &x, depth + 1, sc);
        self.search(g, gamma + 1, beta, &x, depth + 1, sc);
    }

    /// Dijkstra on `G^γ[X]` from an auxiliary source, then stores the result.
    fn costly_round(&mut self, g: &DynGraph, alpha: u64, gamma: u64, x: &[VertexId], sc: &mut Scratch) {
        for &v in x {
            sc.in_x[v] = true;
            self.costly[v] += 1;
        }
        sc.queue.clear();
        for &v in x {
            let mut init = if v == self.source { 0.0 } else { self.virtual_weight };
            for &e in g.in_edges(v) {
                let rec = g.edge(e);
                if sc.in_x[rec.tail] {
                    continue;
                }
                if let Some(w) = rec.weight_at(gamma) {
                    let du = self.coll[rec.tail].prefix_min(alpha).unwrap_or(f64::INFINITY);
                    init = init.min(du + w);
                }
            }
            sc.dist[v] = init;
            sc.queue.push(init, v);
        }
        while let Some((key, u)) = sc.queue.pop() {
            if key != sc.dist[u] {
                continue;
            }
            for &e in g.out_edges(u) {
                let rec = g.edge(e);
                if !sc.in_x[rec.head] {
                    continue;
                }
                if let Some(w) = rec.weight_at(gamma) {
                    let cand = key + w;
                    if cand < sc.dist[rec.head] {
                        sc.dist[rec.head] = cand;
                        sc.queue.push(cand, rec.head);
                    }
                }
            }
        }
        self.dijkstra_runs += 1;
        for &v in x {
            self.coll[v].insert(gamma, sc.dist[v]);
            sc.in_x[v] = false;
            sc.dist[v] = f64::INFINITY;
        }
    }

    /// Estimate of `dist_{G^j}(s, v)`, `None` when `v` is unreachable in
    /// version `j`.
    pub fn query(&self, v: VertexId, j: usize) -> Result<Option<f64>, OfflineError> {
        if v >= self.n {
            return Err(OfflineError::VertexOutOfRange(v));
        }
        if j > self.delta {
            return Err(OfflineError::VersionOutOfRange { j, delta: self.delta });
        }
        match self.reach_time[v] {
            Some(t) if t <= j as u64 => Ok(self.coll[v].prefix_min(j as u64)),
            _ => Ok(None),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of updates `Δ`.
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn collection(&self, v: VertexId) -> &[(u64, f64)] {
        self.coll[v].entries()
    }

    pub fn estimates(&self, v: VertexId) -> &EstimateCollection {
        &self.coll[v]
    }

    /// First version at which `v` is reachable from the source.
    pub fn reach_time(&self, v: VertexId) -> Option<u64> {
        self.reach_time[v]
    }

    /// Number of search calls whose candidate set contained `v`.
    pub fn costly_calls(&self, v: VertexId) -> u32 {
        self.costly[v]
    }

    /// `(1 + log_{1+ξ}(nW)) · log₂ Δ`.
    pub fn costly_bound(&self) -> f64 {
        let per_level = 1.0 + math::ln(self.virtual_weight.max(1.0)) / math::ln(1.0 + self.xi);
        per_level * math::log2(self.delta.max(1) as f64)
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn search_calls(&self) -> u64 {
        self.calls
    }

    pub fn dijkstra_runs(&self) -> u64 {
        self.dijkstra_runs
    }

    pub fn to_parts(&self) -> OfflineParts {
        OfflineParts {
            n: self.n,
            delta: self.delta,
            xi: self.xi,
            source: self.source,
            virtual_weight: self.virtual_weight,
            reach_time: self.reach_time.clone(),
            collections: self.coll.iter().map(|c| c.entries.clone()).collect(),
        }
    }

    /// Rebuilds a query-only structure from serialized parts.
    pub fn from_parts(p: OfflineParts) -> Result<Self, OfflineError> {
        if p.reach_time.len() != p.n || p.collections.len() != p.n {
            return Err(OfflineError::Malformed("vertex count does not match the per-vertex data"));
        }
        if p.source >= p.n {
            return Err(OfflineError::VertexOutOfRange(p.source));
        }
        let mut coll = Vec::with_capacity(p.n);
        for entries in p.collections {
            if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(OfflineError::Malformed("versions not strictly increasing"));
            }
            if entries.iter().any(|e| e.0 > p.delta as u64) {
                return Err(OfflineError::Malformed("version beyond the last update"));
            }
            coll.push(EstimateCollection { entries });
        }
        Ok(Self {
            n: p.n,
            delta: p.delta,
            xi: p.xi,
            source: p.source,
            virtual_weight: p.virtual_weight,
            reach_time: p.reach_time,
            coll,
            costly: vec![0; p.n],
            max_depth: 0,
            calls: 0,
            dijkstra_runs: 0,
        })
    }
}

/// Applies `seq` to `g` and returns, per vertex, the first version at which
/// it is reachable from `source`.
fn replay_reachability(g: &mut DynGraph, seq: &UpdateSequence, source: VertexId) -> Result<Vec<Option<u64>>, GraphError> {
    let n = g.vertex_count();
    let mut reach = vec![None; n];
    let mut stack = vec![source];
    reach[source] = Some(0);
    flood(g, &mut reach, &mut stack, 0);
    for (i, upd) in seq.iter().enumerate() {
        let t = i as u64 + 1;
        g.apply_update(upd)?;
        if upd.kind == UpdateKind::Insert && reach[upd.tail].is_some() && reach[upd.head].is_none() {
            reach[upd.head] = Some(t);
            stack.push(upd.head);
            flood(g, &mut reach, &mut stack, t);
        }
    }
    Ok(reach)
}

fn flood(g: &DynGraph, reach: &mut [Option<u64>], stack: &mut Vec<VertexId>, t: u64) {
    while let Some(u) = stack.pop() {
        g.for_each_out(u, |v, _: Weight| {
            if reach[v].is_none() {
                reach[v] = Some(t);
                stack.push(v);
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Update;

    fn seq(u: &[Update]) -> UpdateSequence {
        UpdateSequence::new(u.to_vec())
    }

    #[test]
    fn collection_prefix_and_suffix() {
        let mut c = EstimateCollection::default();
        c.insert(0, 10.0);
        c.insert(5, 4.0);
        c.insert(9, 6.0);
        assert_eq!(c.prefix_min(4), Some(10.0));
        assert_eq!(c.prefix_min(9), Some(4.0));
        assert_eq!(c.suffix_max(6), Some(6.0));
        assert_eq!(c.suffix_max(10), None);
        c.insert(5, 7.0);
        assert_eq!(c.entries()[1], (5, 4.0));
    }

    #[test]
    fn no_updates_is_exact() {
        let g = DynGraph::with_edges(3, &[(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let off = OfflineSssp::build(&g, &seq(&[]), 0, 0.5).unwrap();
        assert_eq!(off.query(2, 0).unwrap(), Some(5.0));
        assert_eq!(off.collection(2).len(), 1);
        assert!(off.query(2, 1).is_err());
    }

    #[test]
    fn reachability_follows_versions() {
        let g = DynGraph::with_edges(3, &[(0, 1, 2.0)]).unwrap();
        let s = seq(&[Update::insert(1, 2, 1.0), Update::decrease(0, 1, 1.0)]);
        let off = OfflineSssp::build(&g, &s, 0, 0.5).unwrap();
        assert_eq!(off.query(2, 0).unwrap(), None);
        assert_eq!(off.query(2, 1).unwrap(), Some(3.0));
        assert_eq!(off.query(2, 2).unwrap(), Some(2.0));
        assert_eq!(off.reach_time(2), Some(1));
    }

    #[test]
    fn unaffected_vertices_never_costly() {
        // the update touches a component the source cannot reach
        let g = DynGraph::with_edges(4, &[(0, 1, 2.0), (2, 3, 5.0)]).unwrap();
        let s = seq(&[Update::decrease(2, 3, 1.0)]);
        let off = OfflineSssp::build(&g, &s, 0, 0.5).unwrap();
        for v in 0..4 {
            assert_eq!(off.costly_calls(v), 0);
        }
    }

    #[test]
    fn single_in_edge_gets_parent_estimate() {
        let g = DynGraph::with_edges(3, &[(0, 1, 8.0), (1, 2, 8.0)]).unwrap();
        let s = seq(&[Update::decrease(0, 1, 2.0), Update::decrease(1, 2, 2.0)]);
        let off = OfflineSssp::build(&g, &s, 0, 0.5).unwrap();
        assert_eq!(off.query(2, 0).unwrap(), Some(16.0));
        assert_eq!(off.query(2, 1).unwrap(), Some(10.0));
        assert_eq!(off.query(2, 2).unwrap(), Some(4.0));
    }

    #[test]
    fn parts_round_trip() {
        let g = DynGraph::with_edges(3, &[(0, 1, 8.0), (1, 2, 8.0)]).unwrap();
        let s = seq(&[Update::decrease(0, 1, 2.0), Update::insert(0, 2, 1.0)]);
        let off = OfflineSssp::build(&g, &s, 0, 0.5).unwrap();
        let back = OfflineSssp::from_parts(off.to_parts()).unwrap();
        for v in 0..3 {
            for j in 0..=2 {
                assert_eq!(back.query(v, j).unwrap(), off.query(v, j).unwrap());
            }
        }
    }
}
