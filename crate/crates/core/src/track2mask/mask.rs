use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boolean raster marking the cells that belong to one tracked object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    pub object_id: String,
}

impl ObjectMask {
    pub fn empty(width: usize, height: usize, object_id: impl Into<String>) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
            object_id: object_id.into(),
        }
    }

    pub fn from_bits(
        width: usize,
        height: usize,
        bits: Vec<bool>,
        object_id: impl Into<String>,
    ) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::RasterMismatch);
        }
        Ok(Self {
            width,
            height,
            bits,
            object_id: object_id.into(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|b| *b)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Centroid in cell coordinates (x, y), `None` for an empty mask.
    pub fn centroid(&self) -> Option<[f64; 2]> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for (i, _) in self.bits.iter().enumerate().filter(|(_, b)| **b) {
            sx += (i % self.width) as f64;
            sy += (i / self.width) as f64;
            n += 1;
        }
        (n > 0).then(|| [sx / n as f64, sy / n as f64])
    }

    pub fn union_with(&mut self, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::RasterMismatch);
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
        Ok(())
    }

    pub fn iou(&self, other: &Self) -> f64 {
        let inter = self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a && **b)
            .count();
        let union = self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a || **b)
            .count();
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }

    /// Shifted copy; cells moved outside the raster are dropped.
    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        let mut out = Self::empty(self.width, self.height, self.object_id.clone());
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y) {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                    out.set(nx as usize, ny as usize, true);
                }
            }
        }
        out
    }

    /// Chebyshev dilation by `radius` cells.
    pub fn dilated(&self, radius: usize) -> Self {
        if radius == 0 {
            return self.clone();
        }
        let r = radius as i64;
        let mut out = Self::empty(self.width, self.height, self.object_id.clone());
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                if !self.get(x as usize, y as usize) {
                    continue;
                }
                for ny in (y - r).max(0)..=(y + r).min(self.height as i64 - 1) {
                    for nx in (x - r).max(0)..=(x + r).min(self.width as i64 - 1) {
                        out.set(nx as usize, ny as usize, true);
                    }
                }
            }
        }
        out
    }
}
