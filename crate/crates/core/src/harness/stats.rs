use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub n: usize,
    pub rate_a: f64,
    pub rate_b: f64,
    /// `rate_b - rate_a`.
    pub difference: f64,
    /// One-sided bootstrap p-value for `rate_b <= rate_a`.
    pub p_value: f64,
    pub resamples: usize,
}

/// Paired bootstrap over trials: resamples trial indices with replacement
/// and counts how often the mean difference `b - a` fails to be positive.
pub fn paired_bootstrap(
    a: &[bool],
    b: &[bool],
    resamples: usize,
    seed: u64,
) -> Result<PairedComparison> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::NoSamples);
    }
    if resamples == 0 {
        return Err(Error::InvalidConfig(
            "bootstrap needs at least one resample".into(),
        ));
    }
    let n = a.len();
    let diffs: Vec<i32> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| y as i32 - x as i32)
        .collect();
    let rate = |v: &[bool]| v.iter().filter(|&&s| s).count() as f64 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut not_positive = 0usize;
    for _ in 0..resamples {
        let sum: i64 = (0..n).map(|_| diffs[rng.random_range(0..n)] as i64).sum();
        if sum <= 0 {
            not_positive += 1;
        }
    }
    Ok(PairedComparison {
        n,
        rate_a: rate(a),
        rate_b: rate(b),
        difference: rate(b) - rate(a),
        p_value: (not_positive + 1) as f64 / (resamples + 1) as f64,
        resamples,
    })
}
