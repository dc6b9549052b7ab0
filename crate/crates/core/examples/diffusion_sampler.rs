//! Ancestral sampling of a two-mode Gaussian mixture with the cosine schedule,
//! and the effect of the step count and noise variance on the sample spread.

use pcd::policy::{sample_chain, DiffusionSchedule, GaussianMixture, NoiseVariance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spread(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (
        m,
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt(),
    )
}

fn main() -> pcd::Result<()> {
    let target = GaussianMixture {
        weights: vec![0.4, 0.6],
        means: vec![vec![-0.5], vec![0.5]],
        stds: vec![vec![0.1], vec![0.1]],
    };
    let n = 5000;
    for steps in [4, 16, 64, 256] {
        for variance in [NoiseVariance::Posterior, NoiseVariance::Forward] {
            let schedule = DiffusionSchedule::cosine_with(steps, variance)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let xs: Vec<f64> = (0..n)
                .map(|_| sample_chain(1, &schedule, &target, &mut rng).map(|v| v[0]))
                .collect::<pcd::Result<_>>()?;
            let right: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0).collect();
            let (m, sd) = spread(&right);
            println!(
                "K={steps:<4} {variance:<9?} right-mode share {:.3}  right-mode mean {m:.3} sd {sd:.4}",
                right.len() as f64 / n as f64
            );
        }
    }
    println!("target: share 0.600, mean 0.500, sd 0.1000");
    Ok(())
}
