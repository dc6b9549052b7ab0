use serde::{Deserialize, Serialize};

use super::BinGrid;
use crate::error::{Error, Result};

/// Allowed deviation of `Σ probs` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Probability vector over the cells of a [`BinGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalDist {
    grid: BinGrid,
    probs: Vec<f64>,
}

impl CategoricalDist {
    /// Validates an already normalized probability vector.
    pub fn new(grid: BinGrid, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != grid.count() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {} bins",
                probs.len(),
                grid.count()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {p} is not a probability"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { grid, probs })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(grid: BinGrid, weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(grid, weights.into_iter().map(|w| w / total).collect())
    }

    /// Normalizes log-weights with the max-shift trick. `-inf` entries become zero.
    pub fn from_log_weights(grid: BinGrid, log_weights: &[f64]) -> Result<Self> {
        let max = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidDistribution(
                "log-weights have no finite maximum".into(),
            ));
        }
        let weights = log_weights.iter().map(|l| (l - max).exp()).collect();
        Self::from_weights(grid, weights)
    }

    pub fn uniform(grid: BinGrid) -> Self {
        let p = 1.0 / grid.count() as f64;
        Self {
            grid,
            probs: vec![p; grid.count()],
        }
    }

    pub fn grid(&self) -> &BinGrid {
        &self.grid
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the most probable bin, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = k;
            }
        }
        best
    }

    pub fn mode(&self) -> f64 {
        self.grid.center(self.argmax())
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Product of independent per-dimension marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution {
    dims: Vec<CategoricalDist>,
}

impl ActionDistribution {
    pub fn new(dims: Vec<CategoricalDist>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDistribution(
                "need at least one action dimension".into(),
            ));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[CategoricalDist] {
        &self.dims
    }

    pub fn dim(&self, t: usize) -> &CategoricalDist {
        &self.dims[t]
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    /// Joint probability of one bin per dimension.
    pub fn joint_prob(&self, bins: &[usize]) -> f64 {
        self.dims
            .iter()
            .zip(bins)
            .map(|(d, &k)| d.probs()[k])
            .product()
    }

    pub fn into_dims(self) -> Vec<CategoricalDist> {
        self.dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> BinGrid {
        BinGrid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn validation() {
        assert!(CategoricalDist::new(grid(2), vec![0.5, 0.5]).is_ok());
        assert!(CategoricalDist::new(grid(2), vec![0.6, 0.5]).is_err());
        assert!(CategoricalDist::new(grid(2), vec![1.5, -0.5]).is_err());
        assert!(CategoricalDist::new(grid(3), vec![0.5, 0.5]).is_err());
        assert!(CategoricalDist::new(grid(2), vec![f64::NAN, 1.0]).is_err());
        assert!(CategoricalDist::from_weights(grid(2), vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn argmax_prefers_lower_index() {
        let d = CategoricalDist::new(grid(3), vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(d.argmax(), 0);
        let d = CategoricalDist::new(grid(3), vec![0.2, 0.4, 0.4]).unwrap();
        assert_eq!(d.argmax(), 1);
    }

    #[test]
    fn log_weights_handle_neg_infinity() {
        let d = CategoricalDist::from_log_weights(grid(3), &[f64::NEG_INFINITY, 0.0, 0.0]).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.5, 0.5]);
    }
}
