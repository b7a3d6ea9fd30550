use incsp_core::dense::DenseApsp;
use incsp_core::oracle::floyd_warshall;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SLOTS: usize = 16;

fn pair_matrix(edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    floyd_warshall(SLOTS, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_on_accepted_and_bounded_on_unfiltered(seed in 0u64..10_000, xi in 0.01f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseApsp::new(SLOTS, xi);
        let mut accepted = Vec::new();
        let mut raw = Vec::new();
        let mut prev_est = vec![vec![f64::INFINITY; SLOTS]; SLOTS];
        let mut prev_emit = prev_est.clone();
        let mut per_pair = vec![vec![0u32; SLOTS]; SLOTS];
        for _ in 0..120 {
            let u = rng.gen_range(0..SLOTS);
            let v = rng.gen_range(0..SLOTS);
            let w = if rng.gen_range(0..10) == 0 { 0.0 } else { rng.gen_range(1..=50) as f64 };
            let before = a.accepted_updates();
            for (x, y, val) in a.update(u, v, w) {
                prop_assert!(val <= a.estimate(x, y) * (1.0 + xi));
                prop_assert!(val >= a.estimate(x, y));
            }
            raw.push((u, v, w));
            if a.accepted_updates() > before {
                accepted.push((u, v, w));
                per_pair[u][v] += 1;
            }
            let exact = pair_matrix(&accepted);
            let truth = pair_matrix(&raw);
            for x in 0..SLOTS {
                for y in 0..SLOTS {
                    let e = a.estimate(x, y);
                    prop_assert_eq!(e, exact[x][y]);
                    prop_assert!(truth[x][y] <= e);
                    prop_assert!(e <= (1.0 + xi) * (1.0 + xi) * truth[x][y] || e == truth[x][y]);
                    prop_assert!(e <= prev_est[x][y]);
                    prop_assert!(a.last_emitted(x, y) <= prev_emit[x][y]);
                    prev_est[x][y] = e;
                    prev_emit[x][y] = a.last_emitted(x, y);
                }
            }
        }
        let ell = ((SLOTS as f64 * 50.0).ln() / (1.0 + xi).ln()).ceil() as u32;
        for row in &per_pair {
            for &c in row {
                prop_assert!(c <= ell + 1);
            }
        }
    }
}
