//! Phase-based incremental all-pairs shortest paths.
//!
//! Every vertex `s` owns a forward structure `D_s` (distances from `s`) and a
//! reverse structure `DR_s` (distances to `s`), both running on the graph
//! `G_beg` as it was at the start of the current phase plus shortcut edges
//! leaving their root. Updates of the current phase are collected in `E_cur`;
//! their endpoints `V_cur` get slots in a small dense structure `A` over the
//! phase graph `H`, whose edge `uv` weighs `min(D_u(v), E_cur(u, v))`.
//! Estimate changes flow between the three kinds of components as shortcut
//! weight decreases until nothing changes. After `b` updates the phase edges
//! are batch-inserted into all structures with a growing rank offset, and
//! every `p` phases all structures are reset.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dense::DenseApsp;
use crate::graph::{DynGraph, GraphError, Update, UpdateKind, VertexId, Weight};
use crate::math;
use crate::sssp::{SourceSssp, SsspError, DEFAULT_RESET_CONSTANT};
use crate::MIN_XI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Deterministic,
    Randomized,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApspError {
    #[error("accuracy parameter {0} outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sssp(#[from] SsspError),
}

/// Derived parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Accuracy left after reserving a factor for update filtering.
    pub eps_inner: f64,
    /// Phase length `b`.
    pub phase_len: usize,
    /// Phases between resets `p`.
    pub reset_every: usize,
    /// Offset restored by a reset, `ρ*`.
    pub base_offset: u32,
    /// Per-phase offset unit `y'`.
    pub y: u32,
    pub xi: f64,
    /// Edge count the formulas were evaluated with.
    pub m: usize,
}

impl Params {
    pub fn derive(n: usize, m: usize, eps: f64, variant: Variant) -> Self {
        let eps_inner = eps / 4.0;
        let nf = n.max(2) as f64;
        let mf = m.max(2) as f64;
        let phase_len = math::ceil(math::powf(n as f64, 0.5)).max(1.0) as usize;
        let (reset_every, base_offset) = match variant {
            Variant::Deterministic => {
                let p = math::ceil(
                    math::powf(mf, 0.5) * math::powf(eps_inner, 0.5) / (math::powf(nf, 0.25) * math::log2(nf)),
                );
                (p.max(1.0) as usize, 0)
            }
            Variant::Randomized => {
                let p = math::ceil(math::powf(mf, 1.0 / 3.0) / (math::powf(nf, 1.0 / 6.0) * math::powf(eps_inner, 1.0 / 3.0)))
                    .max(1.0);
                (p as usize, math::ceil(p * math::log2(mf)) as u32)
            }
        };
        // m + n bounds the edges of a structure including its shortcuts
        let y = math::ceil_log2_usize(m.max(1) + n) + 2;
        let xi = (eps_inner / (10.0 * reset_every as f64 * y as f64)).max(MIN_XI);
        Self { eps_inner, phase_len, reset_every, base_offset, y, xi, m }
    }

    /// Offset after `k` closed phases since the last reset.
    pub fn offset_after(&self, k: usize) -> u32 {
        self.base_offset + (k as u32) * 4 * self.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    /// `D_s(t)` changed, `s ∈ V_cur`.
    Forward(VertexId, VertexId),
    /// `DR_t(s)` changed, `t ∈ V_cur`.
    Reverse(VertexId, VertexId),
    /// `A` reported a new estimate for the slot pair.
    Dense(usize, usize, f64),
}

/// Edges and endpoints of the current phase.
#[derive(Debug, Clone)]
pub struct PhaseState {
    edges: Vec<Update>,
    slot_of: Vec<Option<usize>>,
    vertex_of: Vec<Option<VertexId>>,
    /// Last value of `D_u(v)` handed to `A`, per slot pair.
    fed: Vec<f64>,
    /// Phases closed since the last reset.
    k: usize,
}

impl PhaseState {
    fn new(n: usize, slots: usize) -> Self {
        Self {
            edges: Vec::new(),
            slot_of: vec![None; n],
            vertex_of: vec![None; slots],
            fed: vec![f64::INFINITY; slots * slots],
            k: 0,
        }
    }

    pub fn edges(&self) -> &[Update] {
        &self.edges
    }

    pub fn slot(&self, v: VertexId) -> Option<usize> {
        self.slot_of[v]
    }

    /// Vertices of `V_cur` in slot order.
    pub fn members(&self) -> impl Iterator<Item = (usize, VertexId)> + '_ {
        self.vertex_of.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v)))
    }

    pub fn phases_since_reset(&self) -> usize {
        self.k
    }
}

/// Work and event counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ApspCounters {
    pub updates_seen: u64,
    pub updates_kept: u64,
    pub phases_closed: u64,
    pub resets: u64,
    /// Shortcut candidates that lowered a stored shortcut weight.
    pub shortcut_decreases: u64,
    /// Shortcut candidates that lost to the stored weight.
    pub shortcut_ignored: u64,
    pub events: u64,
    pub dense_updates: u64,
}

#[derive(Debug, Clone)]
pub struct IncApsp {
    n: usize,
    eps: f64,
    variant: Variant,
    params: Params,
    m_hint: Option<usize>,
    max_weight: Weight,
    /// `G_beg`: the graph at the start of the phase.
    beg: DynGraph,
    /// `G_beg + E_cur` after filtering.
    recorded: DynGraph,
    fwd: Vec<SourceSssp>,
    rev: Vec<SourceSssp>,
    dense: DenseApsp,
    phase: PhaseState,
    queue: VecDeque<Event>,
    rng: ChaCha8Rng,
    counters: ApspCounters,
}

impl IncApsp {
    /// Builds all `2n` structures on `g`. `m_hint` is the final edge count,
    /// if known; otherwise parameters are re-derived at every reset.
    pub fn new(g: &DynGraph, eps: f64, variant: Variant, seed: u64, m_hint: Option<usize>) -> Result<Self, ApspError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(ApspError::EpsilonOutOfRange(eps));
        }
        let n = g.vertex_count();
        let params = Params::derive(n, m_hint.unwrap_or(g.edge_count()), eps, variant);
        let max_weight = g.max_weight().unwrap_or_else(|| g.heaviest());
        let mut beg = DynGraph::with_edges(n, &collapse(g))?;
        beg.set_max_weight(None);
        let recorded = beg.clone();
        let fwd = (0..n)
            .map(|s| SourceSssp::new(&beg.forward(), s, params.xi, max_weight))
            .collect::<Result<Vec<_>, _>>()?;
        let rev = (0..n)
            .map(|s| SourceSssp::new(&beg.reversed(), s, params.xi, max_weight))
            .collect::<Result<Vec<_>, _>>()?;
        let slots = 2 * params.phase_len;
        Ok(Self {
            n,
            eps,
            variant,
            m_hint,
            max_weight,
            dense: DenseApsp::new(slots, params.xi),
            phase: PhaseState::new(n, slots),
            params,
            beg,
            recorded,
            fwd,
            rev,
            queue: VecDeque::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            counters: ApspCounters::default(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn counters(&self) -> ApspCounters {
        self.counters
    }

    pub fn phase(&self) -> &PhaseState {
        &self.phase
    }

    pub fn dense(&self) -> &DenseApsp {
        &self.dense
    }

    /// The graph at the start of the current phase.
    pub fn phase_start_graph(&self) -> &DynGraph {
        &self.beg
    }

    /// The graph of all kept updates (`G_beg + E_cur`).
    pub fn recorded_graph(&self) -> &DynGraph {
        &self.recorded
    }

    pub fn forward(&self, s: VertexId) -> &SourceSssp {
        &self.fwd[s]
    }

    pub fn reverse(&self, t: VertexId) -> &SourceSssp {
        &self.rev[t]
    }

    /// Current rank offset shared by all structures.
    pub fn rank_offset(&self) -> u32 {
        self.fwd.first().map_or(0, SourceSssp::rank_offset)
    }

    /// Estimate of `dist(u, v)`, `None` when `v` is unreachable from `u`.
    pub fn query(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.fwd[u].estimate(v)
    }

    pub fn enable_audit(&mut self) {
        self.fwd.iter_mut().chain(self.rev.iter_mut()).for_each(SourceSssp::enable_audit);
    }

    /// Applies one insertion or decrease. Returns `false` when a decrease
    /// was filtered out.
    pub fn update(&mut self, upd: &Update) -> Result<bool, ApspError> {
        self.counters.updates_seen += 1;
        if upd.kind == UpdateKind::Decrease {
            let cur = self
                .recorded
                .pair_weight(upd.tail, upd.head)
                .ok_or(GraphError::MissingEdge { tail: upd.tail, head: upd.head })?;
            if !(upd.weight * (1.0 + self.params.eps_inner) < cur) {
                return Ok(false);
            }
        }
        self.recorded.apply_update(upd)?;
        self.counters.updates_kept += 1;
        self.phase.edges.push(*upd);
        let (u, v, w) = (upd.tail, upd.head, upd.weight);
        self.enter(u);
        self.enter(v);
        let (su, sv) = (self.slot(u), self.slot(v));
        self.offer_dense(su, sv, w);
        self.drain();
        if self.phase.edges.len() >= self.params.phase_len {
            self.close_phase();
        }
        Ok(true)
    }

    /// Ends the phase early, batch-inserting whatever `E_cur` holds.
    pub fn flush(&mut self) {
        if !self.phase.edges.is_empty() {
            self.close_phase();
        }
    }

    fn slot(&self, v: VertexId) -> usize {
        self.phase.slot_of[v].expect("vertex is in V_cur")
    }

    /// Adds `x` to `V_cur` and establishes the shortcut invariants for it.
    fn enter(&mut self, x: VertexId) {
        if self.phase.slot_of[x].is_some() {
            return;
        }
        let slot = self.phase.vertex_of.iter().position(Option::is_none).expect("at most 2b endpoints per phase");
        self.phase.slot_of[x] = Some(slot);
        self.phase.vertex_of[slot] = Some(x);
        self.fwd[x].track_changes(true);
        self.rev[x].track_changes(true);
        for s in 0..self.n {
            let val = self.rev[x].raw(s);
            self.shortcut_forward(s, x, val);
        }
        for t in 0..self.n {
            let val = self.fwd[x].raw(t);
            self.shortcut_reverse(t, x, val);
        }
        let members: Vec<(usize, VertexId)> = self.phase.members().filter(|&(_, y)| y != x).collect();
        for (sy, y) in members {
            let there = self.fwd[x].raw(y);
            let back = self.fwd[y].raw(x);
            self.feed_dense(slot, sy, there);
            self.feed_dense(sy, slot, back);
        }
    }

    /// Offers `w` as the weight of shortcut `s -> t` in `D_s`.
    fn shortcut_forward(&mut self, s: VertexId, t: VertexId, w: f64) {
        if s == t || !w.is_finite() {
            return;
        }
        let ds = &mut self.fwd[s];
        if ds.source_edges().weight(t).is_some_and(|old| old <= w) {
            self.counters.shortcut_ignored += 1;
            return;
        }
        self.counters.shortcut_decreases += 1;
        ds.source_insert(&self.beg.forward(), t, w).expect("shortcut weights are walk lengths");
        if self.phase.slot_of[s].is_some() {
            for v in self.fwd[s].take_changes() {
                self.queue.push_back(Event::Forward(s, v));
            }
        }
    }

    /// Offers `w` as the weight of the reversed shortcut `t -> s` in `DR_t`.
    fn shortcut_reverse(&mut self, t: VertexId, s: VertexId, w: f64) {
        if s == t || !w.is_finite() {
            return;
        }
        let dr = &mut self.rev[t];
        if dr.source_edges().weight(s).is_some_and(|old| old <= w) {
            self.counters.shortcut_ignored += 1;
            return;
        }
        self.counters.shortcut_decreases += 1;
        dr.source_insert(&self.beg.reversed(), s, w).expect("shortcut weights are walk lengths");
        if self.phase.slot_of[t].is_some() {
            for v in self.rev[t].take_changes() {
                self.queue.push_back(Event::Reverse(t, v));
            }
        }
    }

    /// Hands `D_x(y)` to `A` if it beats the last handed value by `1+ξ`.
    fn feed_dense(&mut self, sx: usize, sy: usize, val: f64) {
        if sx == sy || !val.is_finite() {
            return;
        }
        let i = sx * self.dense.slot_count() + sy;
        if val * (1.0 + self.params.xi) < self.phase.fed[i] {
            self.phase.fed[i] = val;
            self.offer_dense(sx, sy, val);
        }
    }

    fn offer_dense(&mut self, sx: usize, sy: usize, w: f64) {
        self.counters.dense_updates += 1;
        for (x, y, val) in self.dense.update(sx, sy, w) {
            self.queue.push_back(Event::Dense(x, y, val));
        }
    }

    /// Processes queued estimate changes until quiescence.
    fn drain(&mut self) {
        while let Some(ev) = self.queue.pop_front() {
            self.counters.events += 1;
            match ev {
                Event::Dense(x, y, val) => {
                    let vx = self.phase.vertex_of[x].expect("slot in use");
                    let vy = self.phase.vertex_of[y].expect("slot in use");
                    self.shortcut_forward(vx, vy, val);
                    self.shortcut_reverse(vy, vx, val);
                }
                Event::Forward(s, t) => {
                    let val = self.fwd[s].raw(t);
                    self.shortcut_reverse(t, s, val);
                    if let (Some(ss), Some(st)) = (self.phase.slot_of[s], self.phase.slot_of[t]) {
                        self.feed_dense(ss, st, val);
                    }
                }
                Event::Reverse(t, s) => {
                    let val = self.rev[t].raw(s);
                    self.shortcut_forward(s, t, val);
                }
            }
        }
    }

    fn close_phase(&mut self) {
        let edges = core::mem::take(&mut self.phase.edges);
        for upd in &edges {
            self.beg.apply_update(upd).expect("already applied to the recorded graph");
        }
        let alpha = self.params.offset_after(self.phase.k + 1);
        let fwd_batch: Vec<_> = edges.iter().map(|e| (e.tail, e.head, e.weight)).collect();
        let rev_batch: Vec<_> = edges.iter().map(|e| (e.head, e.tail, e.weight)).collect();
        for ds in &mut self.fwd {
            ds.track_changes(false);
            ds.batch_insert(&self.beg.forward(), &fwd_batch, alpha);
        }
        for dr in &mut self.rev {
            dr.track_changes(false);
            dr.batch_insert(&self.beg.reversed(), &rev_batch, alpha);
        }
        self.phase.k += 1;
        self.counters.phases_closed += 1;
        self.queue.clear();
        self.phase.slot_of.iter_mut().for_each(|s| *s = None);
        self.phase.vertex_of.iter_mut().for_each(|s| *s = None);
        self.phase.fed.iter_mut().for_each(|f| *f = f64::INFINITY);
        self.dense = DenseApsp::new(2 * self.params.phase_len, self.params.xi);
        if self.phase.k >= self.params.reset_every {
            self.reset_all();
        }
    }

    fn reset_all(&mut self) {
        match self.variant {
            Variant::Deterministic => {
                for ds in &mut self.fwd {
                    ds.det_reset(&self.beg.forward());
                }
                for dr in &mut self.rev {
                    dr.det_reset(&self.beg.reversed());
                }
            }
            Variant::Randomized => {
                let lambda = u64::from(self.params.base_offset).max(1);
                for ds in &mut self.fwd {
                    let lam = lambda.min(ds.ell());
                    ds.rand_reset(&self.beg.forward(), lam, &mut self.rng, DEFAULT_RESET_CONSTANT)
                        .expect("level within range");
                }
                for dr in &mut self.rev {
                    let lam = lambda.min(dr.ell());
                    dr.rand_reset(&self.beg.reversed(), lam, &mut self.rng, DEFAULT_RESET_CONSTANT)
                        .expect("level within range");
                }
            }
        }
        self.phase.k = 0;
        self.counters.resets += 1;
        if self.m_hint.is_none() {
            // structures keep their ξ; only the schedule follows the graph
            let fresh = Params::derive(self.n, self.beg.edge_count(), self.eps, self.variant);
            self.params.reset_every = fresh.reset_every.max(1);
            self.params.m = fresh.m;
        }
    }

    /// Largest weight used for `ℓ`.
    pub fn max_weight(&self) -> Weight {
        self.max_weight
    }
}

/// Current weights of `g` as a plain edge list.
fn collapse(g: &DynGraph) -> Vec<(VertexId, VertexId, Weight)> {
    g.edges().iter().map(|e| (e.tail, e.head, e.weight())).collect()
}

/// Number of stored shortcut edges over all structures.
pub fn shortcut_count(x: &IncApsp) -> usize {
    (0..x.vertex_count())
        .map(|s| x.forward(s).source_edges().targets().len() + x.reverse(s).source_edges().targets().len())
        .sum()
}

/// Shortcut weights per owner, for inspection: `(owner, head, weight)`.
pub fn forward_shortcuts(x: &IncApsp) -> BTreeMap<(VertexId, VertexId), f64> {
    let mut out = BTreeMap::new();
    for s in 0..x.vertex_count() {
        let se = x.forward(s).source_edges();
        for &t in se.targets() {
            out.insert((s, t), se.weight(t).expect("listed target"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DynGraph {
        DynGraph::with_edges(4, &[(0, 1, 3.0), (1, 2, 3.0), (2, 3, 3.0), (3, 0, 3.0), (0, 2, 8.0), (1, 3, 8.0), (2, 0, 1.0), (3, 1, 1.0)])
            .unwrap()
    }

    #[test]
    fn parameters_for_tiny_instance() {
        let p = Params::derive(4, 8, 0.5, Variant::Deterministic);
        assert!(p.reset_every >= 1);
        assert_eq!(p.phase_len, 2);
        assert!(p.xi >= MIN_XI && p.xi <= 0.5 / 10.0);
        assert_eq!(p.base_offset, 0);
        let r = Params::derive(4, 8, 0.5, Variant::Randomized);
        assert!(r.base_offset >= 1);
    }

    #[test]
    fn offsets_follow_recurrence() {
        let p = Params::derive(16, 64, 0.5, Variant::Randomized);
        for k in 0..5 {
            assert_eq!(p.offset_after(k), p.base_offset + k as u32 * 4 * p.y);
        }
    }

    #[test]
    fn initial_estimates_exact() {
        let g = small();
        let x = IncApsp::new(&g, 0.5, Variant::Deterministic, 1, None).unwrap();
        assert_eq!(x.query(0, 3), Some(9.0));
        assert_eq!(x.query(2, 2), Some(0.0));
        assert_eq!(x.query(3, 2), Some(4.0));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let g = small();
        assert!(IncApsp::new(&g, 0.0, Variant::Deterministic, 1, None).is_err());
        assert!(IncApsp::new(&g, 1.0, Variant::Randomized, 1, None).is_err());
    }

    #[test]
    fn first_update_opens_phase() {
        let g = small();
        let mut x = IncApsp::new(&g, 0.5, Variant::Deterministic, 1, Some(20)).unwrap();
        assert!(x.update(&Update::insert(0, 3, 1.0)).unwrap());
        assert_eq!(x.phase().slot(0), Some(0));
        assert_eq!(x.phase().slot(3), Some(1));
        assert_eq!(x.query(0, 3), Some(1.0));
        assert_eq!(x.query(2, 3), Some(2.0));
    }

    #[test]
    fn filtered_decrease_changes_nothing() {
        let g = small();
        let mut x = IncApsp::new(&g, 0.5, Variant::Deterministic, 1, None).unwrap();
        // 7.9 * (1 + 0.125) > 8
        assert!(!x.update(&Update::decrease(0, 2, 7.9)).unwrap());
        assert!(x.phase().edges().is_empty());
        assert_eq!(x.counters().updates_kept, 0);
        assert!(x.update(&Update::decrease(0, 2, 1.0)).unwrap());
        assert!(x.update(&Update::decrease(0, 9, 1.0)).is_err());
    }

    #[test]
    fn phase_closes_after_b_updates() {
        let g = small();
        let mut x = IncApsp::new(&g, 0.5, Variant::Deterministic, 1, Some(20)).unwrap();
        let b = x.params().phase_len;
        for i in 0..b {
            x.update(&Update::insert(i % 4, (i + 2) % 4, 1.0)).unwrap();
        }
        assert!(x.phase().edges().is_empty());
        assert_eq!(x.counters().phases_closed, 1);
        assert_eq!(x.query(0, 2), Some(1.0));
    }
}
