use incsp_core::graph::generate_random_sequence;
use incsp_core::offline::{OfflineError, OfflineSssp};
use incsp_core::oracle::{exact_sssp, exact_sssp_at};
use incsp_core::{DynGraph, UpdateSequence};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn replayed(g: &DynGraph, seq: &UpdateSequence) -> DynGraph {
    let mut full = g.clone();
    full.set_max_weight(None);
    for u in seq.iter() {
        full.apply_update(u).unwrap();
    }
    full
}

fn as_option(d: f64) -> Option<f64> {
    d.is_finite().then_some(d)
}

#[test]
fn no_updates_answers_exactly() {
    let (g, seq) = generate_random_sequence(30, 80, 10, 0, 2);
    let off = OfflineSssp::build(&g, &seq, 0, 0.3).unwrap();
    let dist = exact_sssp(&g, 0);
    for v in 0..30 {
        assert_eq!(off.query(v, 0).unwrap(), as_option(dist[v]));
    }
}

#[test]
fn out_of_range_version_rejected() {
    let (g, seq) = generate_random_sequence(5, 8, 10, 4, 2);
    let off = OfflineSssp::build(&g, &seq, 0, 0.3).unwrap();
    assert!(matches!(off.query(0, 5), Err(OfflineError::VersionOutOfRange { .. })));
    assert!(matches!(off.query(5, 0), Err(OfflineError::VertexOutOfRange(5))));
}

#[test]
fn stored_values_within_depth_bound() {
    let (g, seq) = generate_random_sequence(64, 192, 20, 300, 6);
    let off = OfflineSssp::build(&g, &seq, 0, 0.5).unwrap();
    let full = replayed(&g, &seq);
    let per_version: Vec<Vec<f64>> = (0..=300).map(|t| exact_sssp_at(&full, 0, t)).collect();
    let depth = (301f64).log2().ceil() as i32;
    let factor = (1.0 + off.xi()).powi(depth + 1);
    for v in 0..64 {
        for &(ts, est) in off.collection(v) {
            let d = per_version[ts as usize][v];
            if d.is_finite() {
                assert!(d <= est && est <= factor * d, "v={v} ts={ts} est={est} dist={d}");
            }
        }
    }
    assert!(f64::from(off.max_depth()) <= f64::from(depth));
}

#[test]
fn endpoint_versions() {
    let (g, seq) = generate_random_sequence(40, 120, 25, 200, 13);
    let off = OfflineSssp::build(&g, &seq, 3, 0.2).unwrap();
    let full = replayed(&g, &seq);
    let first = exact_sssp_at(&full, 3, 0);
    let last = exact_sssp_at(&full, 3, 200);
    for v in 0..40 {
        assert_eq!(off.query(v, 0).unwrap(), as_option(first[v]));
        match off.query(v, 200).unwrap() {
            None => assert!(last[v].is_infinite()),
            Some(e) => assert!(last[v] <= e && e <= 1.2 * last[v]),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn queries_within_factor(seed in 0u64..10_000, n in 2usize..40, delta in 0usize..120, eps in 0.05f64..0.9) {
        let (g, seq) = generate_random_sequence(n, 3 * n, 30, delta, seed);
        let off = OfflineSssp::build(&g, &seq, 0, eps).unwrap();
        let full = replayed(&g, &seq);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let v = rng.gen_range(0..n);
            let j = rng.gen_range(0..=delta);
            let d = exact_sssp_at(&full, 0, j as u64)[v];
            match off.query(v, j).unwrap() {
                None => prop_assert!(d.is_infinite()),
                Some(e) => prop_assert!(d <= e && e <= (1.0 + eps) * d, "v={v} j={j} {e} vs {d}"),
            }
        }
        for v in 0..n {
            prop_assert!(f64::from(off.costly_calls(v)) <= off.costly_bound() || delta <= 1);
            prop_assert!(off.collection(v).len() as f64 <= off.costly_bound().max(f64::from(off.costly_calls(v))) + 2.0);
        }
    }
}
