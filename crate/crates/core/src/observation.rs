use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Plane holding object class intensities.
pub const OBJECT_PLANE: usize = 0;
/// Plane holding global brightness plus the light patch.
pub const LIGHT_PLANE: usize = 1;
/// Plane holding the table texture.
pub const TEXTURE_PLANE: usize = 2;
pub const PLANES: usize = 3;

/// Robot-side state reported alongside the image.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Proprio {
    pub gripper: [f64; 2],
    pub closed: bool,
    pub holding: bool,
}

/// Three-plane raster image of the scene in `[0, 1]`, row-major with row
/// index growing with the world `y` coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    width: usize,
    height: usize,
    planes: [Vec<f64>; PLANES],
    pub step_index: usize,
    pub proprio: Proprio,
}

impl Observation {
    pub fn blank(width: usize, height: usize, step_index: usize, proprio: Proprio) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            planes: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            step_index,
            proprio,
        }
    }

    pub fn from_planes(
        width: usize,
        height: usize,
        planes: [Vec<f64>; PLANES],
        step_index: usize,
        proprio: Proprio,
    ) -> Result<Self> {
        if width == 0 || height == 0 || planes.iter().any(|p| p.len() != width * height) {
            return Err(Error::RasterMismatch);
        }
        if planes
            .iter()
            .flatten()
            .any(|v| !v.is_finite() || !(0.0..=1.0).contains(v))
        {
            return Err(Error::InvalidConfig(
                "observation cells must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            planes,
            step_index,
            proprio,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        &self.planes[c]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.planes[c]
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.planes[c][y * self.width + x]
    }

    pub fn set(&mut self, c: usize, x: usize, y: usize, v: f64) {
        self.planes[c][y * self.width + x] = v;
    }

    /// World coordinates of the center of cell `(x, y)`.
    pub fn cell_center(&self, x: usize, y: usize) -> [f64; 2] {
        [
            (x as f64 + 0.5) / self.width as f64,
            (y as f64 + 0.5) / self.height as f64,
        ]
    }

    /// Raster cell containing a world point, clamped to the image.
    pub fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        let x = ((p[0] * self.width as f64).floor().max(0.0) as usize).min(self.width - 1);
        let y = ((p[1] * self.height as f64).floor().max(0.0) as usize).min(self.height - 1);
        (x, y)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }
}
