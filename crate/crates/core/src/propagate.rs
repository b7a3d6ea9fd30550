//! Estimate vectors and the slack-respecting propagation kernel.
//!
//! [`EstimateVector::propagate`] behaves like Dijkstra seeded with an input
//! set, except that a vertex outside the queue is only enqueued when its
//! estimate would fall by more than a `1+ξ` factor. On return every edge
//! whose endpoints were both enqueued at some point is relaxed
//! (`d(v) ≤ d(u) + w`), and the slack invariant `d(v) ≤ (1+ξ)(d(u) + w)` is
//! restored for all edges provided it held for edges leaving non-input
//! vertices beforehand.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::AddAssign;

use crate::graph::{OutEdges, VertexId, Weight};
use crate::heap::MinQueue;

/// Estimate of a vertex not (yet) reachable from the source.
pub const UNREACHED: f64 = f64::INFINITY;

/// Work counters for propagation calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PdStats {
    /// Logical pops (stale queue entries are not counted).
    pub pops: u64,
    /// Logical pushes: input seeding plus estimate drops.
    pub pushes: u64,
    pub edge_scans: u64,
    /// Sum of out-degrees of touched vertices.
    pub touched_degree_sum: u64,
}

impl AddAssign for PdStats {
    fn add_assign(&mut self, o: Self) {
        self.pops += o.pops;
        self.pushes += o.pushes;
        self.edge_scans += o.edge_scans;
        self.touched_degree_sum += o.touched_degree_sum;
    }
}

/// Notified whenever an estimate is lowered.
pub trait EstimateObserver {
    fn lowered(&mut self, v: VertexId, old: f64, new: f64);
}

impl EstimateObserver for () {
    #[inline]
    fn lowered(&mut self, _: VertexId, _: f64, _: f64) {}
}

/// Per-vertex distance estimates with drop accounting.
#[derive(Debug, Clone)]
pub struct EstimateVector {
    d: Vec<f64>,
    drops: Vec<u32>,
    stats: PdStats,
    queue: MinQueue,
    in_queue: Vec<bool>,
    mark: Vec<u32>,
    epoch: u32,
}

impl EstimateVector {
    pub fn from_values(d: Vec<f64>) -> Self {
        let n = d.len();
        Self {
            d,
            drops: vec![0; n],
            stats: PdStats::default(),
            queue: MinQueue::new(),
            in_queue: vec![false; n],
            mark: vec![0; n],
            epoch: 0,
        }
    }

    /// Exact distances from `source`.
    pub fn exact<G: OutEdges>(g: &G, source: VertexId) -> Self {
        Self::from_values(dijkstra(g, &[(source, 0.0)]))
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> f64 {
        self.d[v]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.d
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Number of queue pushes of `v` caused by a drop of its estimate.
    #[inline]
    pub fn drop_count(&self, v: VertexId) -> u32 {
        self.drops[v]
    }

    pub fn drop_counts(&self) -> &[u32] {
        &self.drops
    }

    pub fn stats(&self) -> PdStats {
        self.stats
    }

    /// Sets `d(v) := value` for a caller that has checked the `1+ξ` guard.
    /// Counted as a drop.
    pub fn lower<O: EstimateObserver>(&mut self, v: VertexId, value: f64, obs: &mut O) {
        debug_assert!(value < self.d[v]);
        obs.lowered(v, self.d[v], value);
        self.d[v] = value;
        self.drops[v] += 1;
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Runs the propagation seeded with `input` and returns every vertex
    /// that entered the queue, input vertices first.
    pub fn propagate<G: OutEdges, O: EstimateObserver>(
        &mut self,
        g: &G,
        input: &[VertexId],
        xi: f64,
        obs: &mut O,
    ) -> Vec<VertexId> {
        let epoch = self.next_epoch();
        let onep = 1.0 + xi;
        let mut touched = Vec::with_capacity(input.len());
        let Self { d, drops, stats, queue, in_queue, mark, .. } = self;
        queue.clear();
        for &v in input {
            if mark[v] != epoch {
                mark[v] = epoch;
                touched.push(v);
                in_queue[v] = true;
                queue.push(d[v], v);
                stats.pushes += 1;
                stats.touched_degree_sum += g.out_degree(v) as u64;
            }
        }
        while let Some((key, u)) = queue.pop() {
            if !in_queue[u] || key != d[u] {
                continue;
            }
            in_queue[u] = false;
            stats.pops += 1;
            let du = d[u];
            g.for_each_out(u, |v, w| {
                stats.edge_scans += 1;
                let cand = du + w;
                if in_queue[v] {
                    // decrease key
                    if cand < d[v] {
                        obs.lowered(v, d[v], cand);
                        d[v] = cand;
                        queue.push(cand, v);
                    }
                } else if d[v] > onep * cand {
                    obs.lowered(v, d[v], cand);
                    d[v] = cand;
                    drops[v] += 1;
                    in_queue[v] = true;
                    queue.push(cand, v);
                    stats.pushes += 1;
                    if mark[v] != epoch {
                        mark[v] = epoch;
                        touched.push(v);
                        stats.touched_degree_sum += g.out_degree(v) as u64;
                    }
                }
            });
        }
        touched
    }

    /// Handles a freshly inserted edge `tail -> head`: if the slack guard
    /// fails, lowers `d(head)` to `d(tail) + w` and propagates from `head`.
    /// Returns the touched set, or `None` when the guard held.
    pub fn relax_insert<G: OutEdges, O: EstimateObserver>(
        &mut self,
        g: &G,
        tail: VertexId,
        head: VertexId,
        w: Weight,
        xi: f64,
        obs: &mut O,
    ) -> Option<Vec<VertexId>> {
        let cand = self.d[tail] + w;
        if self.d[head] > (1.0 + xi) * cand {
            self.lower(head, cand, obs);
            Some(self.propagate(g, &[head], xi, obs))
        } else {
            None
        }
    }
}

/// Edges `(u, v, w)` breaking `d(v) ≤ (1+ξ)(d(u) + w)`.
pub fn slack_violations<G: OutEdges>(g: &G, d: &[f64], xi: f64) -> Vec<(VertexId, VertexId, Weight)> {
    let mut bad = Vec::new();
    for u in 0..g.vertex_count() {
        g.for_each_out(u, |v, w| {
            if d[v] > (1.0 + xi) * (d[u] + w) {
                bad.push((u, v, w));
            }
        });
    }
    bad
}

/// Edges inside `set` that are not relaxed (`d(v) > d(u) + w`).
pub fn unrelaxed_within<G: OutEdges>(g: &G, d: &[f64], set: &[VertexId]) -> Vec<(VertexId, VertexId, Weight)> {
    let mut inside = vec![false; g.vertex_count()];
    for &v in set {
        inside[v] = true;
    }
    let mut bad = Vec::new();
    for &u in set {
        g.for_each_out(u, |v, w| {
            if inside[v] && d[v] > d[u] + w {
                bad.push((u, v, w));
            }
        });
    }
    bad
}

/// Multi-seed Dijkstra: `seeds` are `(vertex, initial distance)` pairs.
/// Unreached vertices get [`UNREACHED`].
pub fn dijkstra<G: OutEdges>(g: &G, seeds: &[(VertexId, f64)]) -> Vec<f64> {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHED; n];
    let mut done = vec![false; n];
    let mut q = MinQueue::new();
    for &(v, d0) in seeds {
        if d0 < dist[v] {
            dist[v] = d0;
            q.push(d0, v);
        }
    }
    while let Some((key, u)) = q.pop() {
        if done[u] || key != dist[u] {
            continue;
        }
        done[u] = true;
        g.for_each_out(u, |v, w| {
            let cand = key + w;
            if cand < dist[v] {
                dist[v] = cand;
                q.push(cand, v);
            }
        });
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_random_graph, DynGraph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_edge_forced_relaxation() {
        let g = DynGraph::with_edges(2, &[(0, 1, 5.0)]).unwrap();
        let mut d = EstimateVector::from_values(vec![0.0, 100.0]);
        let touched = d.propagate(&g, &[0], 0.1, &mut ());
        assert_eq!(d.get(1), 5.0);
        assert_eq!(touched, vec![0, 1]);
        assert_eq!(d.drop_count(1), 1);
    }

    #[test]
    fn slack_blocks_push() {
        let g = DynGraph::with_edges(2, &[(0, 1, 0.0)]).unwrap();
        let mut d = EstimateVector::from_values(vec![10.0, 10.5]);
        let touched = d.propagate(&g, &[0], 0.1, &mut ());
        assert_eq!(d.get(1), 10.5);
        assert_eq!(touched, vec![0]);
    }

    #[test]
    fn relax_insert_examples() {
        let g = DynGraph::with_edges(2, &[(0, 1, 5.0)]).unwrap();
        let mut d = EstimateVector::from_values(vec![0.0, 100.0]);
        assert!(d.relax_insert(&g, 0, 1, 5.0, 0.1, &mut ()).is_some());
        assert_eq!(d.get(1), 5.0);
        let g = DynGraph::with_edges(2, &[(0, 1, 4.9)]).unwrap();
        let mut d = EstimateVector::from_values(vec![0.0, 5.0]);
        assert!(d.relax_insert(&g, 0, 1, 4.9, 0.1, &mut ()).is_none());
        assert_eq!(d.get(1), 5.0);
        assert!(slack_violations(&g, d.values(), 0.1).is_empty());
    }

    #[test]
    fn chain_hand_simulation() {
        // s -> a -> b with unit weights, estimates (0, 100, 100)
        let g = DynGraph::with_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let mut d = EstimateVector::from_values(vec![0.0, 100.0, 100.0]);
        let touched = d.relax_insert(&g, 0, 1, 1.0, 0.1, &mut ()).unwrap();
        assert_eq!(d.values(), &[0.0, 1.0, 2.0]);
        assert_eq!(touched, vec![1, 2]);
    }

    #[test]
    fn violation_detection() {
        let g = DynGraph::with_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(slack_violations(&g, &[1.0, 3.0], 0.1), vec![(0, 1, 1.0)]);
        assert!(slack_violations(&g, &[1.0, 2.2], 0.1).is_empty());
    }

    #[test]
    fn full_propagation_relaxes_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let g = generate_random_graph(32, 128, 50, &mut rng);
            let mut init: Vec<f64> = (0..32).map(|v| if v == 0 { 0.0 } else { 10_000.0 }).collect();
            init[3] = 7.0;
            let mut d = EstimateVector::from_values(init);
            let all: Vec<_> = (0..32).collect();
            let touched = d.propagate(&g, &all, 0.1, &mut ());
            assert_eq!(touched.len(), 32);
            assert!(unrelaxed_within(&g, d.values(), &touched).is_empty());
            for u in 0..32 {
                g.for_each_out(u, |v, w| assert!(d.get(v) <= d.get(u) + w));
            }
        }
    }

    #[test]
    fn unreached_vertices_never_propagate() {
        let g = DynGraph::with_edges(3, &[(1, 2, 1.0)]).unwrap();
        let mut d = EstimateVector::from_values(vec![0.0, UNREACHED, UNREACHED]);
        let touched = d.propagate(&g, &[0, 1], 0.5, &mut ());
        assert_eq!(touched, vec![0, 1]);
        assert_eq!(d.get(2), UNREACHED);
    }
}
