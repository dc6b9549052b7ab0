use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[lower, upper]` into `count` cells.
///
/// Probabilities attached to a grid are evaluated at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    lower: f64,
    upper: f64,
    count: usize,
}

impl BinGrid {
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite, got [{lower}, {upper}]"
            )));
        }
        if upper <= lower {
            return Err(Error::InvalidGrid(format!(
                "upper bound {upper} must exceed lower bound {lower}"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 bins, got {count}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            count,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn width(&self) -> f64 {
        (self.upper - self.lower) / self.count as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        debug_assert!(k < self.count);
        self.lower + (k as f64 + 0.5) * self.width()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.center(k))
    }

    /// Index of the cell containing `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let raw = ((x - self.lower) / self.width()).floor();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.count - 1)
        }
    }

    /// Index of the cell whose center is nearest to `x`; ties go to the lower index.
    pub fn nearest(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, c) in self.centers().enumerate() {
            let d = (c - x).abs();
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }
}
