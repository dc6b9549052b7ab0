//! Turning two clouds of sampled actions into per-dimension distributions on a
//! shared grid, contrasting them and picking an action.

use pcd::action_dist::{
    contrastive_combine_multi, kde_estimate_multi, select_action, DecodeConfig, KdeConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn cloud(rng: &mut ChaCha8Rng, n: usize, modes: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let noise = Normal::new(0.0, 0.01).unwrap();
    (0..n)
        .map(|i| {
            let c = modes[i % modes.len()];
            vec![c[0] + noise.sample(rng), c[1] + noise.sample(rng)]
        })
        .collect()
}

fn main() -> pcd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // two thirds of the samples follow a spurious cue (-x), the rest the
    // object (+x); once the object is masked only the cue remains
    let cue = [-0.04, 0.01];
    let original = cloud(&mut rng, 24, &[[0.04, 0.0], cue, cue]);
    let masked = cloud(&mut rng, 24, &[cue]);

    let kde = KdeConfig::default();
    let (p, q) = kde_estimate_multi(&original, &kde, &masked)?;
    for (d, (a, b)) in p.dims().iter().zip(q.dims()).enumerate() {
        println!(
            "dim {d}: grid [{:.3}, {:.3}] x {} bins, modes {:.4} vs {:.4}",
            a.grid().lower(),
            a.grid().upper(),
            a.grid().count(),
            a.mode(),
            b.mode()
        );
    }

    for alpha in [0.0, 1.0] {
        let cfg = DecodeConfig::with_alpha(alpha);
        let out = contrastive_combine_multi(&p, &q, &cfg)?;
        let a = select_action(&out, &cfg, &mut rng);
        println!("alpha={alpha}: action [{:.4}, {:.4}]", a[0], a[1]);
    }
    Ok(())
}
