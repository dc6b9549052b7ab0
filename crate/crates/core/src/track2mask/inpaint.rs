use serde::{Deserialize, Serialize};

use super::ObjectMask;
use crate::error::{Error, Result};
use crate::observation::{Observation, PLANES};

/// How masked cells are refilled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InpaintStrategy {
    ConstantFill {
        value: f64,
    },
    /// Per-plane mean of the unmasked cells.
    #[default]
    BackgroundMeanFill,
    /// Starts from the mean of the cells bordering the mask, then repeatedly
    /// replaces each masked cell by the average of its 4-neighbours.
    NeighborDiffusionFill {
        iterations: usize,
    },
}

impl InpaintStrategy {
    pub const DEFAULT_DIFFUSION_ITERATIONS: usize = 50;

    pub fn name(&self) -> &'static str {
        match self {
            InpaintStrategy::ConstantFill { .. } => "constant",
            InpaintStrategy::BackgroundMeanFill => "mean",
            InpaintStrategy::NeighborDiffusionFill { .. } => "diffusion",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(InpaintStrategy::ConstantFill { value: 0.0 }),
            "mean" => Ok(InpaintStrategy::BackgroundMeanFill),
            "diffusion" => Ok(InpaintStrategy::NeighborDiffusionFill {
                iterations: Self::DEFAULT_DIFFUSION_ITERATIONS,
            }),
            other => Err(Error::InvalidConfig(format!(
                "unknown inpaint strategy {other:?}"
            ))),
        }
    }

    pub fn all_defaults() -> Vec<Self> {
        ["constant", "mean", "diffusion"]
            .iter()
            .map(|s| Self::parse(s).expect("known strategy"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InpaintStrategy::ConstantFill { value } if !(0.0..=1.0).contains(&value) => Err(
                Error::InvalidConfig(format!("fill value {value} outside [0, 1]")),
            ),
            InpaintStrategy::NeighborDiffusionFill { iterations: 0 } => Err(Error::InvalidConfig(
                "diffusion fill needs at least one iteration".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Returns `obs` with every masked cell refilled on all planes. Unmasked
/// cells are copied unchanged.
pub fn inpaint(
    obs: &Observation,
    mask: &ObjectMask,
    strategy: InpaintStrategy,
) -> Result<Observation> {
    strategy.validate()?;
    if mask.width() != obs.width() || mask.height() != obs.height() {
        return Err(Error::RasterMismatch);
    }
    let mut out = obs.clone();
    if mask.is_empty() {
        return Ok(out);
    }
    let bits = mask.bits();
    match strategy {
        InpaintStrategy::ConstantFill { value } => {
            for c in 0..PLANES {
                fill(out.plane_mut(c), bits, |_| value);
            }
        }
        InpaintStrategy::BackgroundMeanFill => {
            if mask.is_full() {
                return Err(Error::NoBackgroundReference);
            }
            for c in 0..PLANES {
                let m = masked_mean(obs.plane(c), bits.iter().map(|b| !b));
                fill(out.plane_mut(c), bits, |_| m);
            }
        }
        InpaintStrategy::NeighborDiffusionFill { iterations } => {
            let (w, h) = (obs.width(), obs.height());
            let ring: Vec<bool> = (0..w * h)
                .map(|i| !bits[i] && neighbours(i, w, h).any(|j| bits[j]))
                .collect();
            if !ring.iter().any(|&r| r) {
                return Err(Error::NoBackgroundReference);
            }
            for c in 0..PLANES {
                let seed = masked_mean(obs.plane(c), ring.iter().copied());
                let plane = out.plane_mut(c);
                fill(plane, bits, |_| seed);
                let mut next = plane.to_vec();
                for _ in 0..iterations {
                    for i in (0..w * h).filter(|&i| bits[i]) {
                        let (sum, n) = neighbours(i, w, h)
                            .fold((0.0, 0usize), |(s, n), j| (s + plane[j], n + 1));
                        next[i] = sum / n as f64;
                    }
                    plane.copy_from_slice(&next);
                }
            }
        }
    }
    Ok(out)
}

fn fill(plane: &mut [f64], bits: &[bool], value: impl Fn(usize) -> f64) {
    for (i, v) in plane.iter_mut().enumerate() {
        if bits[i] {
            *v = value(i);
        }
    }
}

fn masked_mean(plane: &[f64], keep: impl Iterator<Item = bool>) -> f64 {
    let (sum, n) = plane
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .fold((0.0, 0usize), |(s, n), (v, _)| (s + v, n + 1));
    sum / n as f64
}

fn neighbours(i: usize, w: usize, h: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (i % w, i / w);
    [
        (x > 0).then(|| i - 1),
        (x + 1 < w).then(|| i + 1),
        (y > 0).then(|| i - w),
        (y + 1 < h).then(|| i + w),
    ]
    .into_iter()
    .flatten()
}
