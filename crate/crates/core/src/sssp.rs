//! Incremental single-source shortest paths under source-edge insertions.
//!
//! The structure keeps estimates `d(·)` that are lengths of real walks from
//! the source, satisfy the slack invariant on every edge, and carry integer
//! ranks: every vertex `v` is `(ρ + rank(v))`-certified, i.e. for every path
//! `P = v → t` avoiding the source, `d(t) ≤ (1+ξ)^{ρ+rank(v)} (d(v) + w(P))`.
//! Synchronization keeps the maximum rank `r` at most `log₂ m`, which gives
//! `dist(s, v) ≤ d(v) ≤ (1+ξ)^{1+ρ+r} dist(s, v)`.
//!
//! The base graph is borrowed on every call rather than owned so that many
//! structures (forward and reversed) can share one edge store. Edges leaving
//! the source that were added through [`SourceSssp::source_insert`] live in
//! the structure itself. Callers that grow the base graph must report the new
//! edges through [`SourceSssp::batch_insert`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::graph::{OutEdges, VertexId, Weight};
use crate::math;
use crate::propagate::{unrelaxed_within, EstimateObserver, EstimateVector, PdStats, UNREACHED};
use crate::MIN_XI;

/// Default constant `c` in the randomized reset's iteration count.
pub const DEFAULT_RESET_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsspError {
    #[error("accuracy parameter {0} outside [2^-20, 1)")]
    XiOutOfRange(f64),
    #[error("weight {0} outside {{0}} ∪ [1, ∞)")]
    InvalidWeight(f64),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("reset level {lambda} outside [1, {ell}]")]
    LambdaOutOfRange { lambda: u64, ell: u64 },
}

/// Edges leaving the source that are owned by the structure (source
/// insertions and shortcuts). One slot per head; parallel copies collapse to
/// their minimum.
#[derive(Debug, Clone)]
pub struct SourceEdges {
    weight: Vec<f64>,
    targets: Vec<VertexId>,
    refreshes: Vec<u32>,
}

impl SourceEdges {
    fn new(n: usize) -> Self {
        Self { weight: vec![UNREACHED; n], targets: Vec::new(), refreshes: vec![0; n] }
    }

    /// Weight of the owned source edge into `v`, if present.
    pub fn weight(&self, v: VertexId) -> Option<f64> {
        let w = self.weight[v];
        w.is_finite().then_some(w)
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    /// How many times the stored weight into `v` was lowered.
    pub fn refreshes(&self, v: VertexId) -> u32 {
        self.refreshes[v]
    }
}

/// The structure's graph: the borrowed base plus the owned source edges.
#[derive(Clone, Copy)]
pub struct StructureGraph<'a, G> {
    base: &'a G,
    source: VertexId,
    extra: &'a SourceEdges,
}

impl<G: OutEdges> OutEdges for StructureGraph<'_, G> {
    #[inline]
    fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    #[inline]
    fn out_degree(&self, u: VertexId) -> usize {
        let own = if u == self.source { self.extra.targets.len() } else { 0 };
        self.base.out_degree(u) + own
    }

    #[inline]
    fn for_each_out<F: FnMut(VertexId, Weight)>(&self, u: VertexId, mut f: F) {
        self.base.for_each_out(u, &mut f);
        if u == self.source {
            for &v in &self.extra.targets {
                f(v, self.extra.weight[v]);
            }
        }
    }

    fn edge_total(&self) -> usize {
        self.base.edge_total() + self.extra.targets.len()
    }
}

/// Vertex lists with O(1) moves and per-list degree sums.
#[derive(Debug, Clone, Default)]
struct Classes<K: Ord + Copy> {
    members: BTreeMap<K, (Vec<VertexId>, u64)>,
}

impl<K: Ord + Copy> Classes<K> {
    fn insert(&mut self, pos: &mut [usize], key: K, v: VertexId, deg: u64) {
        let entry = self.members.entry(key).or_default();
        pos[v] = entry.0.len();
        entry.0.push(v);
        entry.1 += deg;
    }

    fn remove(&mut self, pos: &mut [usize], key: K, v: VertexId, deg: u64) {
        let entry = self.members.get_mut(&key).expect("vertex is filed under its key");
        let i = pos[v];
        entry.0.swap_remove(i);
        if let Some(&moved) = entry.0.get(i) {
            pos[moved] = i;
        }
        entry.1 -= deg;
        if entry.0.is_empty() {
            self.members.remove(&key);
        }
    }

    fn add_degree(&mut self, key: K, delta: u64) {
        if let Some(entry) = self.members.get_mut(&key) {
            entry.1 += delta;
        }
    }

    fn degree(&self, key: K) -> u64 {
        self.members.get(&key).map_or(0, |e| e.1)
    }
}

/// Ranks, rank classes `C_k` with their degree sums, and the rank offset.
#[derive(Debug, Clone)]
pub struct RankState {
    rank: Vec<u32>,
    pos: Vec<usize>,
    classes: Classes<u32>,
    offset: u32,
}

impl RankState {
    fn new(degrees: &[u64]) -> Self {
        let n = degrees.len();
        let mut s = Self { rank: vec![0; n], pos: vec![0; n], classes: Classes::default(), offset: 0 };
        for (v, &deg) in degrees.iter().enumerate() {
            s.classes.insert(&mut s.pos, 0, v, deg);
        }
        s
    }

    #[inline]
    pub fn rank(&self, v: VertexId) -> u32 {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// Current maximum rank `r`.
    pub fn max_rank(&self) -> u32 {
        self.classes.members.keys().next_back().copied().unwrap_or(0)
    }

    /// Rank offset `ρ`.
    pub fn offset(&self) -> u32 {
        self.offset
    }

    /// `deg(C_k)`.
    pub fn class_degree(&self, k: u32) -> u64 {
        self.classes.degree(k)
    }

    pub fn class_members(&self, k: u32) -> &[VertexId] {
        self.classes.members.get(&k).map_or(&[], |e| &e.0)
    }

    fn set(&mut self, v: VertexId, k: u32, deg: u64) {
        let old = self.rank[v];
        if old != k {
            self.classes.remove(&mut self.pos, old, v, deg);
            self.classes.insert(&mut self.pos, k, v, deg);
            self.rank[v] = k;
        }
    }

    fn rebuild(&mut self, degrees: &[u64]) {
        self.classes = Classes::default();
        for (v, &deg) in degrees.iter().enumerate() {
            self.classes.insert(&mut self.pos, self.rank[v], v, deg);
        }
    }

    /// Largest `k` breaking `deg(C_k) > Σ_{j>k} deg(C_j)`, if any.
    pub fn unbalanced_class(&self) -> Option<u32> {
        let r = self.max_rank();
        let mut suffix = 0u64;
        for k in (0..=r).rev() {
            let dk = self.class_degree(k);
            if dk <= suffix {
                return Some(k);
            }
            suffix += dk;
        }
        None
    }
}

/// Estimate buckets keyed by `⌊log_{1+ξ} d(v)⌋` (`-1` for `d(v) = 0`),
/// with per-bucket degree sums. Unreached vertices are not bucketed.
#[derive(Debug, Clone)]
struct Buckets {
    key: Vec<Option<i64>>,
    pos: Vec<usize>,
    classes: Classes<i64>,
    inv_ln_base: f64,
}

impl Buckets {
    fn new(d: &[f64], degrees: &[u64], xi: f64) -> Self {
        let n = d.len();
        let mut b = Self {
            key: vec![None; n],
            pos: vec![0; n],
            classes: Classes::default(),
            inv_ln_base: 1.0 / math::ln(1.0 + xi),
        };
        for v in 0..n {
            b.refile(v, d[v], degrees[v]);
        }
        b
    }

    fn key_of(&self, d: f64) -> Option<i64> {
        if d == 0.0 {
            Some(-1)
        } else if d.is_finite() {
            Some(math::floor(math::ln(d) * self.inv_ln_base) as i64)
        } else {
            None
        }
    }

    fn refile(&mut self, v: VertexId, d: f64, deg: u64) {
        let new = self.key_of(d);
        let old = self.key[v];
        if new == old {
            return;
        }
        if let Some(k) = old {
            self.classes.remove(&mut self.pos, k, v, deg);
        }
        if let Some(k) = new {
            self.classes.insert(&mut self.pos, k, v, deg);
        }
        self.key[v] = new;
    }

    fn rebuild(&mut self, degrees: &[u64]) {
        self.classes = Classes::default();
        for (v, &deg) in degrees.iter().enumerate() {
            if let Some(k) = self.key[v] {
                self.classes.insert(&mut self.pos, k, v, deg);
            }
        }
    }

    fn degree_in(&self, lo: i64, hi: i64) -> u64 {
        self.classes.members.range(lo..=hi).map(|(_, e)| e.1).sum()
    }

    fn members_in(&self, lo: i64, hi: i64) -> impl Iterator<Item = VertexId> + '_ {
        self.classes.members.range(lo..=hi).flat_map(|(_, e)| e.0.iter().copied())
    }
}

/// Vertices whose estimate changed since the last drain.
#[derive(Debug, Clone)]
struct ChangeLog {
    enabled: bool,
    list: Vec<VertexId>,
    flag: Vec<bool>,
}

impl ChangeLog {
    fn record(&mut self, v: VertexId) {
        if self.enabled && !self.flag[v] {
            self.flag[v] = true;
            self.list.push(v);
        }
    }
}

struct Tracker<'a> {
    degree: &'a [u64],
    buckets: &'a mut Buckets,
    log: &'a mut ChangeLog,
}

impl EstimateObserver for Tracker<'_> {
    #[inline]
    fn lowered(&mut self, v: VertexId, _old: f64, new: f64) {
        self.buckets.refile(v, new, self.degree[v]);
        self.log.record(v);
    }
}

/// Self-checks run inside the structure when auditing is enabled.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Audit {
    pub propagations: u64,
    pub synchronizations: u64,
    /// Edges inside a touched set left unrelaxed after a propagation.
    pub unrelaxed_edges: u64,
    /// Completed synchronizations leaving an unbalanced class or `2^r > m`.
    pub rank_violations: u64,
    pub first_failure: Option<String>,
}

impl Audit {
    fn fail(&mut self, msg: String) {
        if self.first_failure.is_none() {
            self.first_failure = Some(msg);
        }
    }
}

/// Outcome of one randomized reset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResetReport {
    pub samples: u64,
    pub distinct_intervals: u64,
    pub accepted_intervals: u64,
    pub seeded: usize,
    pub seeded_degree: u64,
}

/// Incremental SSSP with ranks, synchronization, batch insertion and resets.
#[derive(Debug, Clone)]
pub struct SourceSssp {
    source: VertexId,
    xi: f64,
    ell: u64,
    est: EstimateVector,
    extra: SourceEdges,
    degree: Vec<u64>,
    ranks: RankState,
    buckets: Buckets,
    log: ChangeLog,
    rank_increases: Vec<u32>,
    sync_input_total: u64,
    sync_rounds: u64,
    triggered_inserts: u64,
    ignored_inserts: u64,
    audit: Option<Audit>,
}

impl SourceSssp {
    /// Initializes exact estimates with Dijkstra; all ranks and the offset
    /// start at 0. `max_weight` is the weight bound `W` used for
    /// `ℓ = ⌈log_{1+ξ}(nW)⌉`.
    pub fn new<G: OutEdges>(base: &G, source: VertexId, xi: f64, max_weight: Weight) -> Result<Self, SsspError> {
        if !(MIN_XI..1.0).contains(&xi) {
            return Err(SsspError::XiOutOfRange(xi));
        }
        let n = base.vertex_count();
        if source >= n {
            return Err(SsspError::VertexOutOfRange(source));
        }
        let extra = SourceEdges::new(n);
        let est = EstimateVector::exact(&StructureGraph { base, source, extra: &extra }, source);
        let degree: Vec<u64> = (0..n).map(|v| base.out_degree(v) as u64).collect();
        let ell = math::ceil_log(1.0 + xi, (n as f64) * max_weight.max(1.0)).max(1);
        Ok(Self {
            source,
            xi,
            ell,
            ranks: RankState::new(&degree),
            buckets: Buckets::new(est.values(), &degree, xi),
            est,
            extra,
            degree,
            log: ChangeLog { enabled: false, list: Vec::new(), flag: vec![false; n] },
            rank_increases: vec![0; n],
            sync_input_total: 0,
            sync_rounds: 0,
            triggered_inserts: 0,
            ignored_inserts: 0,
            audit: None,
        })
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// `ℓ = ⌈log_{1+ξ}(nW)⌉`.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn vertex_count(&self) -> usize {
        self.est.len()
    }

    pub fn estimates(&self) -> &EstimateVector {
        &self.est
    }

    /// Raw estimate: [`UNREACHED`] for vertices not reachable from the source.
    #[inline]
    pub fn raw(&self, v: VertexId) -> f64 {
        self.est.get(v)
    }

    /// Estimate of `dist(s, v)`, `None` when `v` is unreachable.
    pub fn estimate(&self, v: VertexId) -> Option<f64> {
        let d = self.est.get(v);
        d.is_finite().then_some(d)
    }

    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.est.get(v).is_finite()
    }

    pub fn ranks(&self) -> &RankState {
        &self.ranks
    }

    pub fn rank_offset(&self) -> u32 {
        self.ranks.offset
    }

    pub fn max_rank(&self) -> u32 {
        self.ranks.max_rank()
    }

    /// Exponent `1 + ρ + r` of the current approximation guarantee.
    pub fn error_exponent(&self) -> u32 {
        1 + self.ranks.offset + self.ranks.max_rank()
    }

    pub fn source_edges(&self) -> &SourceEdges {
        &self.extra
    }

    pub fn stats(&self) -> PdStats {
        self.est.stats()
    }

    pub fn rank_increases(&self) -> &[u32] {
        &self.rank_increases
    }

    /// Total size of the inputs handed to propagation by synchronization.
    pub fn sync_input_total(&self) -> u64 {
        self.sync_input_total
    }

    pub fn sync_rounds(&self) -> u64 {
        self.sync_rounds
    }

    pub fn triggered_inserts(&self) -> u64 {
        self.triggered_inserts
    }

    pub fn ignored_inserts(&self) -> u64 {
        self.ignored_inserts
    }

    /// Out-degree of `v` in the structure's graph as last reported.
    pub fn degree(&self, v: VertexId) -> u64 {
        self.degree[v]
    }

    /// The graph this structure maintains distances in.
    pub fn graph<'a, G: OutEdges>(&'a self, base: &'a G) -> StructureGraph<'a, G> {
        StructureGraph { base, source: self.source, extra: &self.extra }
    }

    /// Turns on internal self-checks after every propagation and every
    /// completed synchronization.
    pub fn enable_audit(&mut self) {
        self.audit.get_or_insert_with(Audit::default);
    }

    pub fn audit(&self) -> Option<&Audit> {
        self.audit.as_ref()
    }

    /// Records which vertices change estimate, for [`Self::take_changes`].
    pub fn track_changes(&mut self, on: bool) {
        self.log.enabled = on;
        if !on {
            self.clear_changes();
        }
    }

    /// Drains the vertices whose estimate dropped since the last call.
    pub fn take_changes(&mut self) -> Vec<VertexId> {
        let list = core::mem::take(&mut self.log.list);
        for &v in &list {
            self.log.flag[v] = false;
        }
        list
    }

    pub fn clear_changes(&mut self) {
        let _ = self.take_changes();
    }

    fn run_propagation<G: OutEdges>(&mut self, base: &G, input: &[VertexId]) -> Vec<VertexId> {
        let g = StructureGraph { base, source: self.source, extra: &self.extra };
        let mut tracker = Tracker { degree: &self.degree, buckets: &mut self.buckets, log: &mut self.log };
        let touched = self.est.propagate(&g, input, self.xi, &mut tracker);
        if let Some(audit) = self.audit.as_mut() {
            audit.propagations += 1;
            let bad = unrelaxed_within(&g, self.est.values(), &touched);
            if let Some(&(u, v, w)) = bad.first() {
                audit.unrelaxed_edges += bad.len() as u64;
                audit.fail(format!("edge {u}->{v} (w={w}) unrelaxed after propagation #{}", audit.propagations));
            }
        }
        touched
    }

    fn assign_rank(&mut self, v: VertexId, k: u32) {
        // a vertex without out-edges is trivially 0-certified
        let k = if self.degree[v] == 0 { 0 } else { k };
        let old = self.ranks.rank(v);
        if k > old {
            self.rank_increases[v] += 1;
        }
        self.ranks.set(v, k, self.degree[v]);
    }

    /// Inserts (or lowers) the source edge `s -> v` of weight `w`.
    ///
    /// Returns `true` when the estimate of `v` dropped and propagation ran.
    /// The stored edge weight is refreshed even when the guard holds.
    pub fn source_insert<G: OutEdges>(&mut self, base: &G, v: VertexId, w: Weight) -> Result<bool, SsspError> {
        if !(w.is_finite() && (w == 0.0 || w >= 1.0)) {
            return Err(SsspError::InvalidWeight(w));
        }
        if v >= self.vertex_count() {
            return Err(SsspError::VertexOutOfRange(v));
        }
        let s = self.source;
        if v == s {
            self.ignored_inserts += 1;
            return Ok(false);
        }
        let old = self.extra.weight[v];
        if old.is_infinite() {
            self.extra.targets.push(v);
            self.extra.weight[v] = w;
            self.degree[s] += 1;
            self.ranks.classes.add_degree(self.ranks.rank(s), 1);
            if let Some(k) = self.buckets.key[s] {
                self.buckets.classes.add_degree(k, 1);
            }
        } else if w < old {
            self.extra.weight[v] = w;
            self.extra.refreshes[v] += 1;
        }
        if !(self.est.get(v) > (1.0 + self.xi) * w) {
            self.ignored_inserts += 1;
            return Ok(false);
        }
        self.triggered_inserts += 1;
        {
            let mut tracker = Tracker { degree: &self.degree, buckets: &mut self.buckets, log: &mut self.log };
            self.est.lower(v, w, &mut tracker);
        }
        let touched = self.run_propagation(base, &[v]);
        let next = self.ranks.max_rank() + 1;
        for t in touched {
            self.assign_rank(t, next);
        }
        self.synchronize(base);
        Ok(true)
    }

    /// Merges rank classes until `deg(C_k) > Σ_{j>k} deg(C_j)` for every
    /// `k ≤ r`, re-propagating from each merged suffix of classes.
    fn synchronize<G: OutEdges>(&mut self, base: &G) {
        while self.ranks.max_rank() > 0 {
            let Some(k) = self.ranks.unbalanced_class() else { break };
            let r = self.ranks.max_rank();
            let input: Vec<VertexId> =
                (k..=r).flat_map(|j| self.ranks.class_members(j).iter().copied()).collect();
            self.sync_input_total += input.len() as u64;
            self.sync_rounds += 1;
            let touched = self.run_propagation(base, &input);
            for t in touched {
                self.assign_rank(t, k);
            }
        }
        if self.audit.is_some() {
            let m = self.graph(base).edge_total();
            let r = self.ranks.max_rank();
            let unbalanced = if r > 0 { self.ranks.unbalanced_class() } else { None };
            let too_high = r > 0 && (1u64 << r.min(63)) > m as u64;
            let audit = self.audit.as_mut().expect("checked above");
            audit.synchronizations += 1;
            if unbalanced.is_some() || too_high {
                audit.rank_violations += 1;
                audit.fail(format!("after synchronization: r={r}, m={m}, unbalanced class {unbalanced:?}"));
            }
        }
    }

    /// Incorporates a batch `F` of arbitrary edges that the caller has
    /// already added to `base`.
    ///
    /// The caller guarantees `d(v) ≤ (1+ξ)^α · dist_{G+F}(s, v)` for every
    /// `v`; afterwards every vertex is `α`-certified and `ρ = α`.
    pub fn batch_insert<G: OutEdges>(&mut self, base: &G, batch: &[(VertexId, VertexId, Weight)], alpha: u32) {
        self.refresh_degrees(base);
        for &(u, v, w) in batch {
            let cand = self.est.get(u) + w;
            if self.est.get(v) > (1.0 + self.xi) * cand {
                let mut tracker = Tracker { degree: &self.degree, buckets: &mut self.buckets, log: &mut self.log };
                self.est.lower(v, cand, &mut tracker);
                self.run_propagation(base, &[v]);
            }
        }
        self.ranks.offset = alpha;
        self.synchronize(base);
    }

    /// Re-reads every out-degree from `base` and rebuilds the degree sums.
    pub fn refresh_degrees<G: OutEdges>(&mut self, base: &G) {
        let g = StructureGraph { base, source: self.source, extra: &self.extra };
        for v in 0..self.degree.len() {
            self.degree[v] = g.out_degree(v) as u64;
        }
        self.ranks.rebuild(&self.degree);
        self.buckets.rebuild(&self.degree);
    }

    /// Propagates from every vertex, making all vertices 0-certified, and
    /// zeroes all ranks and the offset.
    pub fn det_reset<G: OutEdges>(&mut self, base: &G) {
        let all: Vec<VertexId> = (0..self.vertex_count()).collect();
        self.run_propagation(base, &all);
        for v in 0..self.vertex_count() {
            let deg = self.degree[v];
            self.ranks.set(v, 0, deg);
        }
        self.ranks.offset = 0;
    }

    /// Randomized reset to level `λ`: propagates from the union of sampled
    /// low-degree estimate intervals so that every vertex is `λ`-certified
    /// with high probability, then sets `ρ = λ`.
    ///
    /// `c` scales the number of samples `⌈c · (25ℓ/λ) · log₂ n⌉`.
    pub fn rand_reset<G: OutEdges, R: Rng + ?Sized>(
        &mut self,
        base: &G,
        lambda: u64,
        rng: &mut R,
        c: f64,
    ) -> Result<ResetReport, SsspError> {
        let ell = self.ell;
        if lambda == 0 || lambda > ell {
            return Err(SsspError::LambdaOutOfRange { lambda, ell });
        }
        let n = self.vertex_count().max(2) as f64;
        let lam = lambda as f64;
        let samples = (math::ceil(c * 25.0 * ell as f64 / lam * math::log2(n)) as u64).max(1);
        let top = (lambda / 8) as usize;
        let width = 8.0 * ell as f64 / lam;
        let mut seen = vec![false; top + 1];
        let mut distinct = 0;
        let mut drawn = 0;
        // Z depends only on which intervals were drawn, so stop once all were
        while drawn < samples && distinct <= top {
            let j = rng.gen_range(0..=top);
            drawn += 1;
            if !seen[j] {
                seen[j] = true;
                distinct += 1;
            }
        }
        let m = self.graph(base).edge_total().max(1) as f64;
        let cap = 400.0 * m * ell as f64 / (lam * lam);
        let mut report = ResetReport { samples: drawn, distinct_intervals: distinct as u64, ..Default::default() };
        let mut chosen = vec![false; self.vertex_count()];
        let mut z = Vec::new();
        for (j, _) in seen.iter().enumerate().filter(|(_, &hit)| hit) {
            // zero estimates live in bucket -1
            let lo = if j == 0 { -1 } else { math::floor(j as f64 * width) as i64 };
            let hi = math::floor((j + 2) as f64 * width) as i64;
            let deg = self.buckets.degree_in(lo, hi);
            if deg as f64 <= cap {
                report.accepted_intervals += 1;
                for v in self.buckets.members_in(lo, hi) {
                    if !chosen[v] {
                        chosen[v] = true;
                        z.push(v);
                        report.seeded_degree += self.degree[v];
                    }
                }
            }
        }
        report.seeded = z.len();
        self.run_propagation(base, &z);
        self.ranks.offset = lambda as u32;
        Ok(report)
    }

    /// Recounts class degrees from scratch and compares them with the
    /// maintained sums.
    pub fn check_rank_bookkeeping<G: OutEdges>(&self, base: &G) -> Result<(), String> {
        let g = self.graph(base);
        let mut sums: BTreeMap<u32, u64> = BTreeMap::new();
        for v in 0..self.vertex_count() {
            let deg = g.out_degree(v) as u64;
            if deg != self.degree[v] {
                return Err(format!("degree of {v} is {deg}, recorded {}", self.degree[v]));
            }
            *sums.entry(self.ranks.rank(v)).or_default() += deg;
        }
        let r = self.ranks.max_rank();
        for k in 0..=r {
            let want = sums.get(&k).copied().unwrap_or(0);
            if want != self.ranks.class_degree(k) {
                return Err(format!("deg(C_{k}) is {want}, recorded {}", self.ranks.class_degree(k)));
            }
        }
        if sums.keys().any(|&k| k > r) {
            return Err(format!("rank above recorded maximum {r}"));
        }
        Ok(())
    }

    /// `true` iff every class satisfies `deg(C_k) > Σ_{j>k} deg(C_j)` and
    /// `2^r ≤ m`.
    pub fn ranks_balanced<G: OutEdges>(&self, base: &G) -> bool {
        let r = self.ranks.max_rank();
        if r == 0 {
            return true;
        }
        let m = self.graph(base).edge_total() as u64;
        self.ranks.unbalanced_class().is_none() && (1u64 << r.min(63)) <= m
    }
}
