//! Small dense all-pairs structure over a fixed number of slots.
//!
//! Maintains exact distances of the graph formed by accepted updates. An
//! update is accepted only if it beats the pair's accepted weight by more
//! than a `1+ξ` factor, and a pair's estimate is reported to the caller only
//! when it falls by more than `1+ξ` below the last reported value.

use alloc::vec;
use alloc::vec::Vec;

/// One reported estimate change: `(x, y, value)`.
pub type Emission = (usize, usize, f64);

#[derive(Debug, Clone)]
pub struct DenseApsp {
    slots: usize,
    xi: f64,
    est: Vec<f64>,
    accepted: Vec<f64>,
    emitted: Vec<f64>,
    accepted_updates: u64,
    rejected_updates: u64,
}

impl DenseApsp {
    pub fn new(slots: usize, xi: f64) -> Self {
        let slots = slots.max(1);
        let mut est = vec![f64::INFINITY; slots * slots];
        for i in 0..slots {
            est[i * slots + i] = 0.0;
        }
        Self {
            slots,
            xi,
            emitted: est.clone(),
            est,
            accepted: vec![f64::INFINITY; slots * slots],
            accepted_updates: 0,
            rejected_updates: 0,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    #[inline]
    pub fn estimate(&self, u: usize, v: usize) -> f64 {
        self.est[u * self.slots + v]
    }

    /// Weight of the last accepted update on `(u, v)`, infinite if none.
    pub fn accepted_weight(&self, u: usize, v: usize) -> f64 {
        self.accepted[u * self.slots + v]
    }

    /// Last value reported for `(x, y)`, infinite if never reported.
    pub fn last_emitted(&self, x: usize, y: usize) -> f64 {
        self.emitted[x * self.slots + y]
    }

    pub fn accepted_updates(&self) -> u64 {
        self.accepted_updates
    }

    pub fn rejected_updates(&self) -> u64 {
        self.rejected_updates
    }

    /// Offers edge `u -> v` of weight `w` and returns the pairs whose
    /// reported estimate changed.
    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Vec<Emission> {
        let k = self.slots;
        if !(w * (1.0 + self.xi) < self.accepted[u * k + v]) {
            self.rejected_updates += 1;
            return Vec::new();
        }
        self.accepted[u * k + v] = w;
        self.accepted_updates += 1;
        if u == v || !(w < self.est[u * k + v]) {
            return Vec::new();
        }
        // neither column u nor row v can improve through the new edge
        let into_u: Vec<f64> = (0..k).map(|x| self.est[x * k + u]).collect();
        let from_v: Vec<f64> = self.est[v * k..(v + 1) * k].to_vec();
        let onep = 1.0 + self.xi;
        let mut out = Vec::new();
        for (x, &dxu) in into_u.iter().enumerate() {
            if dxu.is_infinite() {
                continue;
            }
            let base = dxu + w;
            for (y, &dvy) in from_v.iter().enumerate() {
                let cand = base + dvy;
                let i = x * k + y;
                if cand < self.est[i] {
                    self.est[i] = cand;
                    if cand * onep < self.emitted[i] {
                        self.emitted[i] = cand;
                        out.push((x, y, cand));
                    }
                }
            }
        }
        out
    }
}
