use rand::Rng;

use super::{ActionDistribution, CategoricalDist, DecodeConfig, Selection};

/// Picks one bin of `dist` according to the selection rule.
pub fn select_index<R: Rng + ?Sized>(
    dist: &CategoricalDist,
    selection: Selection,
    rng: &mut R,
) -> usize {
    match selection {
        Selection::Greedy => dist.argmax(),
        Selection::Sample => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let probs = dist.probs();
            for (k, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return k;
                }
            }
            // rounding left u above the running total; take the last non-empty bin
            probs
                .iter()
                .rposition(|&p| p > 0.0)
                .unwrap_or(probs.len() - 1)
        }
    }
}

/// Bin centers chosen per dimension.
pub fn select_action<R: Rng + ?Sized>(
    dist: &ActionDistribution,
    cfg: &DecodeConfig,
    rng: &mut R,
) -> Vec<f64> {
    dist.dims()
        .iter()
        .map(|d| d.grid().center(select_index(d, cfg.selection, rng)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_dist::BinGrid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn action(p: &[f64], lower: f64, upper: f64) -> ActionDistribution {
        let grid = BinGrid::new(lower, upper, p.len()).unwrap();
        ActionDistribution::new(vec![CategoricalDist::new(grid, p.to_vec()).unwrap()]).unwrap()
    }

    #[test]
    fn point_mass_returns_its_center() {
        let d = action(&[0.0, 1.0], -0.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for selection in [Selection::Greedy, Selection::Sample] {
            let cfg = DecodeConfig {
                selection,
                ..Default::default()
            };
            assert_eq!(select_action(&d, &cfg, &mut rng), vec![0.25]);
        }
    }

    #[test]
    fn greedy_tie_goes_low() {
        let d = action(&[0.4, 0.4, 0.2], 0.0, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            select_action(&d, &DecodeConfig::default(), &mut rng),
            vec![0.5]
        );
    }

    #[test]
    fn sampling_frequencies_match_probs() {
        let probs = [0.1, 0.25, 0.05, 0.4, 0.2];
        let d = action(&probs, 0.0, 5.0);
        let cfg = DecodeConfig {
            selection: Selection::Sample,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            let x = select_action(&d, &cfg, &mut rng)[0];
            counts[x.floor() as usize] += 1;
        }
        for (c, p) in counts.iter().zip(probs) {
            let freq = *c as f64 / n as f64;
            let bound = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() <= bound, "freq {freq} p {p} bound {bound}");
        }
        let again: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..10)
                .map(|_| select_action(&d, &cfg, &mut rng)[0])
                .collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let first: Vec<f64> = (0..10)
            .map(|_| select_action(&d, &cfg, &mut rng)[0])
            .collect();
        assert_eq!(first, again);
    }
}
