use std::collections::BTreeMap;

use incsp_core::graph::{filter_decreases, generate_random_sequence, generate_source_sequence};
use incsp_core::oracle::{all_pairs, exact_sssp};
use incsp_core::{DynGraph, Update, UpdateKind, UpdateSequence};
use proptest::prelude::*;

fn log_ceil(base: f64, x: f64) -> u64 {
    (x.ln() / base.ln()).ceil() as u64
}

/// Kept decreases per `(tail, head)` pair.
fn kept_per_pair(seq: &UpdateSequence) -> BTreeMap<(usize, usize), u64> {
    let mut out = BTreeMap::new();
    for u in seq.iter().filter(|u| u.kind == UpdateKind::Decrease) {
        *out.entry((u.tail, u.head)).or_default() += 1;
    }
    out
}

#[test]
fn invariant_sweep_over_generated_sequence() {
    let (mut g, seq) = generate_random_sequence(64, 256, 100, 500, 7);
    g.check_invariants().unwrap();
    for u in seq.iter() {
        g.apply_update(u).unwrap();
        g.check_invariants().unwrap();
    }
    assert_eq!(g.current_time(), 500);
}

#[test]
fn generator_runs_are_identical() {
    let a = generate_random_sequence(4, 4, 10, 4, 1);
    let b = generate_random_sequence(4, 4, 10, 4, 1);
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    let c = generate_source_sequence(16, 40, 10, 30, 3, 9);
    assert!(c.1.iter().all(|u| u.tail == 3));
}

#[test]
fn filter_keeps_large_drop() {
    let g = DynGraph::new(2);
    let seq = UpdateSequence::new(vec![Update::insert(0, 1, 8.0), Update::decrease(0, 1, 4.0)]);
    assert_eq!(filter_decreases(&g, &seq, 0.1).len(), 2);
}

#[test]
fn filter_count_on_long_sequence() {
    let (g, seq) = generate_random_sequence(24, 60, 100, 1000, 21);
    let kept = filter_decreases(&g, &seq, 0.25);
    let bound = log_ceil(1.25, 100.0);
    assert_eq!(bound, 21);
    for (pair, c) in kept_per_pair(&kept) {
        assert!(c <= bound, "{pair:?} kept {c} decreases");
    }
}

#[test]
fn distances_never_increase() {
    let (mut g, seq) = generate_random_sequence(20, 50, 30, 200, 4);
    let mut prev = all_pairs(&g);
    for u in seq.iter() {
        g.apply_update(u).unwrap();
        let now = all_pairs(&g);
        for (a, b) in prev.iter().flatten().zip(now.iter().flatten()) {
            assert!(b <= a);
        }
        prev = now;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weight_at_replays_history(seed in 0u64..10_000, n in 2usize..12, m in 0usize..30, delta in 0usize..60) {
        let (base, seq) = generate_random_sequence(n, m, 20, delta, seed);
        let mut g = base.clone();
        // snapshot of each edge's weight while version t was current
        let mut seen: Vec<Vec<Option<f64>>> = vec![g.edges().iter().map(|e| Some(e.weight())).collect()];
        for u in seq.iter() {
            g.apply_update(u).unwrap();
            seen.push(g.edges().iter().map(|e| Some(e.weight())).collect());
        }
        for (t, snap) in seen.iter().enumerate() {
            for e in 0..g.edge_count() {
                let expect = snap.get(e).copied().flatten();
                prop_assert_eq!(g.weight_at(e, t as u64), expect);
            }
        }
    }

    #[test]
    fn filtered_weights_track_unfiltered(seed in 0u64..10_000, eps in 0.05f64..0.9, delta in 1usize..120) {
        let (base, seq) = generate_random_sequence(8, 16, 64, delta, seed);
        let kept = filter_decreases(&base, &seq, eps);
        let mut full = base.clone();
        let mut rec = base.clone();
        let mut it = kept.iter().peekable();
        for u in seq.iter() {
            full.apply_update(u).unwrap();
            if it.peek() == Some(&u) {
                rec.apply_update(it.next().unwrap()).unwrap();
            }
            for a in 0..8 {
                for b in 0..8 {
                    match (full.pair_weight(a, b), rec.pair_weight(a, b)) {
                        (None, None) => {}
                        (Some(f), Some(r)) => prop_assert!(f <= r && r <= (1.0 + eps) * f, "({a},{b}) {f} vs {r}"),
                        other => prop_assert!(false, "pair ({a},{b}) presence differs: {other:?}"),
                    }
                }
            }
        }
        prop_assert!(it.next().is_none());
    }

    #[test]
    fn kept_decreases_respect_log_bound(seed in 0u64..10_000, eps in 0.05f64..0.9, w in 2u64..300) {
        let (base, seq) = generate_random_sequence(6, 10, w, 150, seed);
        let kept = filter_decreases(&base, &seq, eps);
        let bound = log_ceil(1.0 + eps, w as f64);
        for (pair, c) in kept_per_pair(&kept) {
            prop_assert!(c <= bound, "{pair:?} kept {c} > {bound}");
        }
    }

    #[test]
    fn version_snapshots_give_per_version_distances(seed in 0u64..10_000, delta in 0usize..40) {
        let (base, seq) = generate_random_sequence(10, 20, 15, delta, seed);
        let mut g = base.clone();
        let mut dists = vec![exact_sssp(&g, 0)];
        for u in seq.iter() {
            g.apply_update(u).unwrap();
            dists.push(exact_sssp(&g, 0));
        }
        for (t, d) in dists.iter().enumerate() {
            prop_assert_eq!(&exact_sssp(&g.version(t as u64), 0), d);
        }
    }
}
