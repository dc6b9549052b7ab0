use serde::{Deserialize, Serialize};

use super::{ActionDistribution, BinGrid, CategoricalDist};
use crate::error::{Error, Result};

/// Lower bound applied to every computed bandwidth.
pub const BANDWIDTH_FLOOR: f64 = 1e-6;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// How the kernel bandwidth is chosen for a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    Fixed(f64),
    Scott,
}

impl BandwidthRule {
    pub fn bandwidth(&self, samples: &[f64]) -> Result<f64> {
        match *self {
            BandwidthRule::Fixed(b) => {
                if b > 0.0 && b.is_finite() {
                    Ok(b)
                } else {
                    Err(Error::InvalidBandwidth(b))
                }
            }
            BandwidthRule::Scott => scott_bandwidth(samples),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KdeConfig {
    /// Candidate actions drawn per branch.
    pub n_samples: usize,
    pub bandwidth: BandwidthRule,
    pub grid_count: usize,
    /// Grid padding beyond the sample range, in bandwidth multiples.
    pub support_pad: f64,
}

impl Default for KdeConfig {
    fn default() -> Self {
        Self {
            n_samples: 24,
            bandwidth: BandwidthRule::Scott,
            grid_count: 256,
            support_pad: 4.0,
        }
    }
}

impl KdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig(
                "kde.n_samples must be positive".into(),
            ));
        }
        if let BandwidthRule::Fixed(b) = self.bandwidth {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidBandwidth(b));
            }
        }
        if self.grid_count < 16 {
            return Err(Error::InvalidConfig(format!(
                "kde.grid_count must be at least 16, got {}",
                self.grid_count
            )));
        }
        if !(self.support_pad >= 0.0 && self.support_pad.is_finite()) {
            return Err(Error::InvalidConfig(
                "kde.support_pad must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Standard normal density.
pub fn gaussian_kernel(u: f64) -> f64 {
    (-0.5 * u * u - LN_SQRT_2PI).exp()
}

fn check_finite(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    match samples.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFiniteSample {
            index,
            value: samples[index],
        }),
        None => Ok(()),
    }
}

/// Scott's rule `σ̂ · N^(-1/5)` with the sample (n-1) standard deviation,
/// floored at [`BANDWIDTH_FLOOR`].
pub fn scott_bandwidth(samples: &[f64]) -> Result<f64> {
    check_finite(samples)?;
    let n = samples.len() as f64;
    let sd = if samples.len() < 2 {
        0.0
    } else {
        let mean = samples.iter().sum::<f64>() / n;
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    };
    Ok((sd * n.powf(-0.2)).max(BANDWIDTH_FLOOR))
}

/// Unnormalized kernel sum `Σ_j K((x - x_j) / b)`.
pub fn kernel_sum(samples: &[f64], bandwidth: f64, x: f64) -> f64 {
    samples
        .iter()
        .map(|s| gaussian_kernel((x - s) / bandwidth))
        .sum()
}

/// Gaussian KDE evaluated at the bin centers of `grid` and renormalized.
///
/// Accumulation happens in log space so grids far from all samples still
/// produce a valid distribution instead of an all-zero vector.
pub fn kde_estimate(samples: &[f64], grid: &BinGrid, bandwidth: f64) -> Result<CategoricalDist> {
    check_finite(samples)?;
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidBandwidth(bandwidth));
    }
    let log_density: Vec<f64> = grid
        .centers()
        .map(|c| {
            let terms = samples.iter().map(|s| {
                let u = (c - s) / bandwidth;
                -0.5 * u * u
            });
            log_sum_exp(terms)
        })
        .collect();
    CategoricalDist::from_log_weights(*grid, &log_density)
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn grid_for(lo: f64, hi: f64, pad: f64, count: usize) -> Result<BinGrid> {
    BinGrid::new(lo - pad, hi + pad, count)
}

/// Shared support for two sample sets: their joint range padded by
/// `support_pad` times the larger of the two bandwidths.
pub fn kde_grid(samples_a: &[f64], samples_b: &[f64], config: &KdeConfig) -> Result<BinGrid> {
    check_finite(samples_a)?;
    check_finite(samples_b)?;
    let b = config
        .bandwidth
        .bandwidth(samples_a)?
        .max(config.bandwidth.bandwidth(samples_b)?);
    let (lo, hi) = samples_a
        .iter()
        .chain(samples_b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    grid_for(lo, hi, config.support_pad * b, config.grid_count)
}

fn columns(samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = samples.first().map(Vec::len).ok_or(Error::NoSamples)?;
    if m == 0 {
        return Err(Error::InvalidDistribution(
            "samples have zero action dimensions".into(),
        ));
    }
    let mut cols = vec![Vec::with_capacity(samples.len()); m];
    for row in samples {
        if row.len() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: row.len(),
            });
        }
        for (col, &x) in cols.iter_mut().zip(row) {
            col.push(x);
        }
    }
    for (dim, col) in cols.iter().enumerate() {
        if col.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteDimension { dim });
        }
    }
    Ok(cols)
}

fn check_rows(samples: &[Vec<f64>]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "KDE needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    Ok(())
}

/// Per-dimension KDE of the original and object-masked sample sets
/// (rows are samples, columns action dimensions). Each dimension's two
/// marginals share one grid so they can be contrasted.
pub fn kde_estimate_multi(
    samples: &[Vec<f64>],
    config: &KdeConfig,
    samples_masked: &[Vec<f64>],
) -> Result<(ActionDistribution, ActionDistribution)> {
    config.validate()?;
    check_rows(samples)?;
    check_rows(samples_masked)?;
    let cols = columns(samples)?;
    let cols_masked = columns(samples_masked)?;
    if cols.len() != cols_masked.len() {
        return Err(Error::DimensionMismatch {
            left: cols.len(),
            right: cols_masked.len(),
        });
    }
    let mut original = Vec::with_capacity(cols.len());
    let mut masked = Vec::with_capacity(cols.len());
    for (a, b) in cols.iter().zip(&cols_masked) {
        let grid = kde_grid(a, b, config)?;
        original.push(kde_estimate(a, &grid, config.bandwidth.bandwidth(a)?)?);
        masked.push(kde_estimate(b, &grid, config.bandwidth.bandwidth(b)?)?);
    }
    Ok((
        ActionDistribution::new(original)?,
        ActionDistribution::new(masked)?,
    ))
}

/// Single-branch variant: each dimension's grid spans only its own samples.
pub fn kde_estimate_marginals(
    samples: &[Vec<f64>],
    config: &KdeConfig,
) -> Result<ActionDistribution> {
    config.validate()?;
    check_rows(samples)?;
    let dims = columns(samples)?
        .iter()
        .map(|col| {
            let grid = kde_grid(col, col, config)?;
            kde_estimate(col, &grid, config.bandwidth.bandwidth(col)?)
        })
        .collect::<Result<Vec<_>>>()?;
    ActionDistribution::new(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Direct evaluation of the normalized Gaussian mixture at bin centers.
    fn mixture_oracle(samples: &[f64], lower: f64, upper: f64, count: usize, b: f64) -> Vec<f64> {
        let width = (upper - lower) / count as f64;
        let raw: Vec<f64> = (0..count)
            .map(|k| {
                let x = lower + (k as f64 + 0.5) * width;
                samples
                    .iter()
                    .map(|s| {
                        let u = (x - s) / b;
                        (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
                    })
                    .sum::<f64>()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|r| r / total).collect()
    }

    #[test]
    fn scott_power_of_two() {
        let c = (31.0f64 / 32.0).sqrt();
        let samples: Vec<f64> = (0..32).map(|i| if i % 2 == 0 { c } else { -c }).collect();
        let b = scott_bandwidth(&samples).unwrap();
        assert!((b - 0.5).abs() < 1e-12, "{b}");
    }

    #[test]
    fn scott_constant_samples_hit_floor() {
        assert_eq!(scott_bandwidth(&[3.0; 10]).unwrap(), BANDWIDTH_FLOOR);
        assert_eq!(scott_bandwidth(&[3.0]).unwrap(), BANDWIDTH_FLOOR);
    }

    #[test]
    fn scott_matches_hand_computed_sd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..100).map(|_| rng.sample(StandardNormal)).collect();
        // two-pass variance, then 100^-0.2 = 10^-0.4
        let mean = samples.iter().sum::<f64>() / 100.0;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 99.0;
        let expected = var.sqrt() * 10f64.powf(-0.4);
        assert!((scott_bandwidth(&samples).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn scott_rejects_bad_input() {
        assert_eq!(scott_bandwidth(&[]), Err(Error::NoSamples));
        assert!(matches!(
            scott_bandwidth(&[1.0, f64::INFINITY]),
            Err(Error::NonFiniteSample { index: 1, .. })
        ));
    }

    #[test]
    fn kernel_value_at_zero() {
        let v = kernel_sum(&[0.0], 1.0, 0.0);
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((gaussian_kernel(0.0) - 0.39894).abs() < 1e-5);
    }

    #[test]
    fn symmetric_samples_give_symmetric_probs() {
        let grid = BinGrid::new(-3.0, 3.0, 64).unwrap();
        let d = kde_estimate(&[-1.0, 1.0], &grid, 0.4).unwrap();
        let p = d.probs();
        for k in 0..64 {
            assert!((p[k] - p[63 - k]).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_mixture_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<f64> = (0..24)
            .map(|_| 0.3 + 0.05 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let grid = BinGrid::new(-1.0, 1.0, 256).unwrap();
        let d = kde_estimate(&samples, &grid, 0.05).unwrap();
        let oracle = mixture_oracle(&samples, -1.0, 1.0, 256, 0.05);
        let dev = d
            .probs()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-12, "max deviation {dev}");
    }

    #[test]
    fn far_grid_still_normalizes() {
        let grid = BinGrid::new(100.0, 101.0, 16).unwrap();
        let d = kde_estimate(&[0.0], &grid, 0.01).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d.argmax(), 0);
    }

    #[test]
    fn estimate_errors() {
        let grid = BinGrid::new(-1.0, 1.0, 16).unwrap();
        assert!(matches!(
            kde_estimate(&[0.0], &grid, 0.0),
            Err(Error::InvalidBandwidth(_))
        ));
        assert!(matches!(
            kde_estimate(&[0.0], &grid, -1.0),
            Err(Error::InvalidBandwidth(_))
        ));
        assert!(matches!(
            kde_estimate(&[f64::NAN], &grid, 1.0),
            Err(Error::NonFiniteSample { .. })
        ));
        assert_eq!(kde_estimate(&[], &grid, 1.0), Err(Error::NoSamples));
    }

    #[test]
    fn grid_examples() {
        let cfg = KdeConfig {
            bandwidth: BandwidthRule::Fixed(1.0),
            ..KdeConfig::default()
        };
        let g = kde_grid(&[0.0], &[0.0], &cfg).unwrap();
        assert_eq!((g.lower(), g.upper(), g.count()), (-4.0, 4.0, 256));
        let g = kde_grid(&[0.0], &[10.0], &cfg).unwrap();
        assert_eq!((g.lower(), g.upper()), (-4.0, 14.0));
    }

    #[test]
    fn multi_reports_bad_dimension() {
        let cfg = KdeConfig::default();
        let a = vec![vec![0.0, 1.0], vec![0.5, f64::NAN]];
        let b = vec![vec![0.0, 1.0], vec![0.5, 0.2]];
        assert_eq!(
            kde_estimate_multi(&a, &cfg, &b),
            Err(Error::NonFiniteDimension { dim: 1 })
        );
        let c = vec![vec![0.0], vec![0.5]];
        assert!(matches!(
            kde_estimate_multi(&b, &cfg, &c),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(kde_estimate_multi(&b[..1], &cfg, &b).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(KdeConfig::default().validate().is_ok());
        assert!(KdeConfig {
            grid_count: 8,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(KdeConfig {
            bandwidth: BandwidthRule::Fixed(0.0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(KdeConfig {
            n_samples: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
