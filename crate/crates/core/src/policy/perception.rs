use serde::{Deserialize, Serialize};

use super::Instruction;
use crate::error::{Error, Result};
use crate::observation::{Observation, Proprio, LIGHT_PLANE, OBJECT_PLANE};
use crate::simworld::class_intensity;

/// Half-width of the intensity band that counts as one object class.
const CLASS_TOLERANCE: f64 = 0.04;
/// Peak-over-median below which no light patch is reported.
const MIN_CONTRAST: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightCue {
    pub pos: [f64; 2],
    /// Peak minus median of the light plane.
    pub contrast: f64,
}

/// What the synthetic policies read off an observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Percept {
    pub target: Option<[f64; 2]>,
    pub reference: Option<[f64; 2]>,
    /// The instruction names a destination or reference object.
    pub expects_reference: bool,
    pub light: Option<LightCue>,
    pub proprio: Proprio,
}

/// Centroid of all plane-0 cells within the class band around `intensity`.
pub fn locate_class(obs: &Observation, intensity: f64) -> Option<[f64; 2]> {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for y in 0..obs.height() {
        for x in 0..obs.width() {
            if (obs.get(OBJECT_PLANE, x, y) - intensity).abs() <= CLASS_TOLERANCE {
                let [cx, cy] = obs.cell_center(x, y);
                sx += cx;
                sy += cy;
                n += 1;
            }
        }
    }
    (n > 0).then(|| [sx / n as f64, sy / n as f64])
}

/// Brightest region of the light plane: weighted centroid of the cells above
/// half contrast.
pub fn locate_light(obs: &Observation) -> Option<LightCue> {
    let plane = obs.plane(LIGHT_PLANE);
    let mut sorted = plane.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let peak = sorted[sorted.len() - 1];
    let contrast = peak - median;
    if contrast < MIN_CONTRAST {
        return None;
    }
    let threshold = median + 0.5 * contrast;
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    for y in 0..obs.height() {
        for x in 0..obs.width() {
            let w = obs.get(LIGHT_PLANE, x, y) - threshold;
            if w > 0.0 {
                let [cx, cy] = obs.cell_center(x, y);
                sx += w * cx;
                sy += w * cy;
                sw += w;
            }
        }
    }
    (sw > 0.0).then(|| LightCue {
        pos: [sx / sw, sy / sw],
        contrast,
    })
}

pub fn perceive(obs: &Observation, instr: &Instruction) -> Result<Percept> {
    let lookup =
        |label: &String| class_intensity(label).ok_or_else(|| Error::UnknownLabel(label.clone()));
    let mut labels = instr.target_labels.iter();
    let target = match labels.next() {
        Some(l) => locate_class(obs, lookup(l)?),
        None => {
            return Err(Error::InvalidConfig(
                "instruction names no target object".into(),
            ))
        }
    };
    let reference = match labels.next() {
        Some(l) => locate_class(obs, lookup(l)?),
        None => None,
    };
    Ok(Percept {
        target,
        reference,
        expects_reference: instr.target_labels.len() > 1,
        light: locate_light(obs),
        proprio: obs.proprio,
    })
}
