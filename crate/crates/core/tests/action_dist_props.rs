mod support;

use pcd::action_dist::{
    contrastive_combine, contrastive_combine_multi, kde_estimate, kde_estimate_marginals,
    kde_estimate_multi, kde_grid, scott_bandwidth, select_action, ActionDistribution,
    BandwidthRule, BinGrid, CategoricalDist, DecodeConfig, KdeConfig,
};
use pcd::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{contrast_oracle, kde_oracle};

fn grid(k: usize) -> BinGrid {
    BinGrid::new(-1.0, 1.0, k).unwrap()
}

fn dist(w: &[f64]) -> CategoricalDist {
    CategoricalDist::from_weights(grid(w.len()), w.to_vec()).unwrap()
}

fn weight_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..24).prop_flat_map(|k| {
        (
            prop::collection::vec(1e-3..1.0f64, k),
            prop::collection::vec(1e-3..1.0f64, k),
        )
    })
}

fn sample_rows(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0..3.0f64, m), 2..40)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn combined_odds_grow_with_alpha(
        (p, q) in weight_pair(),
        a1 in 0.0..3.0f64,
        gap in 1e-2..2.0f64,
    ) {
        let (pd, qd) = (dist(&p), dist(&q));
        let lo = contrastive_combine(&pd, &qd, &DecodeConfig::with_alpha(a1)).unwrap();
        let hi = contrastive_combine(&pd, &qd, &DecodeConfig::with_alpha(a1 + gap)).unwrap();
        let ratio: Vec<f64> = pd.probs().iter().zip(qd.probs()).map(|(a, b)| (a / b).ln()).collect();
        for i in 0..ratio.len() {
            for j in 0..ratio.len() {
                if ratio[i] - ratio[j] > 1e-6 {
                    let odds_lo = (lo.probs()[i] / lo.probs()[j]).ln();
                    let odds_hi = (hi.probs()[i] / hi.probs()[j]).ln();
                    prop_assert!(odds_hi > odds_lo, "bins {i},{j}: {odds_lo} -> {odds_hi}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn zero_alpha_returns_original((p, q) in weight_pair()) {
        let (p, q) = (dist(&p), dist(&q));
        let out = contrastive_combine(&p, &q, &DecodeConfig::with_alpha(0.0)).unwrap();
        for (a, b) in out.probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn identical_branches_are_a_fixed_point(p in prop::collection::vec(1e-3..1.0f64, 2..24), alpha in 0.0..4.0f64) {
        let p = dist(&p);
        let out = contrastive_combine(&p, &p, &DecodeConfig::with_alpha(alpha)).unwrap();
        for (a, b) in out.probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn combine_matches_direct_evaluation((p, q) in weight_pair(), alpha in 0.0..3.0f64) {
        let (pd, qd) = (dist(&p), dist(&q));
        let cfg = DecodeConfig::with_alpha(alpha);
        let out = contrastive_combine(&pd, &qd, &cfg).unwrap();
        let expect = contrast_oracle(pd.probs(), qd.probs(), alpha, cfg.prob_floor);
        for (a, b) in out.probs().iter().zip(&expect) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
        prop_assert!((out.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn kde_matches_gaussian_mixture(
        samples in prop::collection::vec(-2.0..2.0f64, 1..50),
        b in 0.01..1.0f64,
        count in 16usize..300,
    ) {
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 4.0 * b;
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 4.0 * b;
        let g = BinGrid::new(lo, hi, count).unwrap();
        let d = kde_estimate(&samples, &g, b).unwrap();
        let expect = kde_oracle(&samples, lo, hi, count, b);
        for (a, e) in d.probs().iter().zip(&expect) {
            prop_assert!((a - e).abs() <= 1e-12);
        }
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn shared_grid_covers_both_branches_with_margin(
        a in prop::collection::vec(-5.0..5.0f64, 2..40),
        b in prop::collection::vec(-5.0..5.0f64, 2..40),
    ) {
        let cfg = KdeConfig::default();
        let g = kde_grid(&a, &b, &cfg).unwrap();
        let bw = scott_bandwidth(&a).unwrap().max(scott_bandwidth(&b).unwrap());
        for &x in a.iter().chain(&b) {
            prop_assert!(x - g.lower() >= 4.0 * bw - 1e-9);
            prop_assert!(g.upper() - x >= 4.0 * bw - 1e-9);
        }
    }

    #[test]
    fn kde_ignores_row_order(rows in sample_rows(3), shift in 1usize..40) {
        let cfg = KdeConfig::default();
        let mut rotated = rows.clone();
        let n = rotated.len();
        rotated.rotate_left(shift % n);
        rotated.reverse();
        let (a, am) = kde_estimate_multi(&rows, &cfg, &rows).unwrap();
        let (b, bm) = kde_estimate_multi(&rotated, &cfg, &rotated).unwrap();
        for (x, y) in a.dims().iter().chain(am.dims()).zip(b.dims().iter().chain(bm.dims())) {
            prop_assert!((x.grid().lower() - y.grid().lower()).abs() <= 1e-12);
            prop_assert!((x.grid().upper() - y.grid().upper()).abs() <= 1e-12);
            for (p, q) in x.probs().iter().zip(y.probs()) {
                prop_assert!((p - q).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn kde_multi_handles_seven_dimensions(rows in sample_rows(7), masked in sample_rows(7)) {
        let cfg = KdeConfig::default();
        let (p, q) = kde_estimate_multi(&rows, &cfg, &masked).unwrap();
        prop_assert_eq!(p.arity(), 7);
        prop_assert_eq!(q.arity(), 7);
        for (a, b) in p.dims().iter().zip(q.dims()) {
            prop_assert_eq!(a.grid(), b.grid());
            prop_assert!((a.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        let combined = contrastive_combine_multi(&p, &q, &DecodeConfig::default());
        prop_assert!(combined.is_ok());
    }

    #[test]
    fn one_dimensional_rows_match_scalar_kde(xs in prop::collection::vec(-3.0..3.0f64, 2..40)) {
        let cfg = KdeConfig::default();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let (p, _) = kde_estimate_multi(&rows, &cfg, &rows).unwrap();
        let single = kde_estimate_marginals(&rows, &cfg).unwrap();
        let g = kde_grid(&xs, &xs, &cfg).unwrap();
        let scalar = kde_estimate(&xs, &g, scott_bandwidth(&xs).unwrap()).unwrap();
        prop_assert_eq!(p.dim(0), &scalar);
        prop_assert_eq!(single.dim(0), &scalar);
    }

    #[test]
    fn greedy_selection_is_the_joint_argmax(ws in prop::collection::vec(prop::collection::vec(1e-3..1.0f64, 2..12), 1..5)) {
        let dims: Vec<CategoricalDist> = ws.iter().map(|w| dist(w)).collect();
        let ad = ActionDistribution::new(dims).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let action = select_action(&ad, &DecodeConfig::default(), &mut rng);
        let chosen: Vec<usize> = action.iter().zip(ad.dims()).map(|(&x, d)| d.grid().nearest(x)).collect();
        let best = ad.joint_prob(&chosen);
        // Exhaustive search over the product space.
        let mut idx = vec![0usize; ad.arity()];
        loop {
            prop_assert!(ad.joint_prob(&idx) <= best + 1e-15);
            let mut t = 0;
            while t < idx.len() {
                idx[t] += 1;
                if idx[t] < ad.dim(t).len() {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
            if t == idx.len() {
                break;
            }
        }
    }
}

#[test]
fn worked_three_bin_example() {
    let p = dist(&[0.5, 0.3, 0.2]);
    let q = dist(&[0.6, 0.3, 0.1]);
    let out = contrastive_combine(&p, &q, &DecodeConfig::with_alpha(1.0)).unwrap();
    for (a, b) in out.probs().iter().zip([0.37313, 0.26866, 0.35821]) {
        assert!((a - b).abs() < 5e-6, "{a} vs {b}");
    }
}

#[test]
fn grid_mismatch_is_rejected() {
    let p = CategoricalDist::uniform(BinGrid::new(0.0, 1.0, 8).unwrap());
    let q = CategoricalDist::uniform(BinGrid::new(0.0, 2.0, 8).unwrap());
    assert!(matches!(
        contrastive_combine(&p, &q, &DecodeConfig::default()),
        Err(Error::GridMismatch)
    ));
}

#[test]
fn negative_alpha_is_rejected() {
    let p = dist(&[0.5, 0.5]);
    assert!(matches!(
        contrastive_combine(&p, &p, &DecodeConfig::with_alpha(-0.1)),
        Err(Error::NegativeAlpha(_))
    ));
}

#[test]
fn scott_bandwidth_on_hundred_points() {
    let xs: Vec<f64> = (0..100)
        .map(|i| (i as f64 * 0.37).sin() * 2.0 + i as f64 * 0.01)
        .collect();
    let sd = support::sample_std(&xs);
    let expected = sd * 100f64.powf(-0.2);
    assert!((scott_bandwidth(&xs).unwrap() - expected).abs() < 1e-14);
    assert!((BandwidthRule::Scott.bandwidth(&xs).unwrap() - expected).abs() < 1e-14);
}

#[test]
fn degenerate_samples_use_the_floor() {
    let xs = vec![0.25; 10];
    assert_eq!(
        scott_bandwidth(&xs).unwrap(),
        pcd::action_dist::BANDWIDTH_FLOOR
    );
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x]).collect();
    let (p, _) = kde_estimate_multi(&rows, &KdeConfig::default(), &rows).unwrap();
    assert!((p.dim(0).mode() - 0.25).abs() < 1e-6);
}
