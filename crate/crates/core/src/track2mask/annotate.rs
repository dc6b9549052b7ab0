use std::collections::VecDeque;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::tracker::{TrackerMode, TrackerState};
use super::{ObjectMask, APPEARANCE_TOLERANCE, BACKGROUND_LEVEL};
use crate::error::{Error, Result};
use crate::observation::{Observation, OBJECT_PLANE};
use crate::simworld::GroundTruth;

/// How the first-frame annotation is supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnotationPrompt {
    /// Click on a raster cell.
    Point { x: usize, y: usize },
    /// Half-open cell rectangle `[x0, x1) × [y0, y1)`.
    Box {
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
    },
    /// Detector backed by ground truth, which misses the object with
    /// probability `miss_prob` and otherwise shifts and grows the true
    /// footprint by up to `jitter` cells.
    Detector {
        label: String,
        miss_prob: f64,
        jitter: usize,
    },
}

impl AnnotationPrompt {
    pub fn validate(&self, obs: &Observation) -> Result<()> {
        let (w, h) = (obs.width(), obs.height());
        match self {
            AnnotationPrompt::Point { x, y } if *x >= w || *y >= h => Err(Error::InvalidPrompt(
                format!("point ({x}, {y}) outside {w}x{h} raster"),
            )),
            AnnotationPrompt::Box { x0, y0, x1, y1 }
                if x1 <= x0 || y1 <= y0 || *x1 > w || *y1 > h =>
            {
                Err(Error::InvalidPrompt(format!(
                    "box ({x0}, {y0})-({x1}, {y1}) invalid for {w}x{h} raster"
                )))
            }
            AnnotationPrompt::Detector { miss_prob, .. } if !(0.0..=1.0).contains(miss_prob) => {
                Err(Error::InvalidPrompt(format!(
                    "miss probability {miss_prob} outside [0, 1]"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// 4-connected region of cells whose plane-0 value lies within the
/// appearance band of the seed cell. Empty if the seed is background.
pub fn component_at(obs: &Observation, x: usize, y: usize, object_id: &str) -> ObjectMask {
    let mut mask = ObjectMask::empty(obs.width(), obs.height(), object_id);
    let seed = obs.get(OBJECT_PLANE, x, y);
    if seed <= BACKGROUND_LEVEL {
        return mask;
    }
    flood(obs, &mut mask, x, y, seed);
    mask
}

fn flood(obs: &Observation, mask: &mut ObjectMask, x: usize, y: usize, level: f64) {
    let inside = |x: usize, y: usize| {
        let v = obs.get(OBJECT_PLANE, x, y);
        v > BACKGROUND_LEVEL && (v - level).abs() <= APPEARANCE_TOLERANCE
    };
    let mut queue = VecDeque::from([(x, y)]);
    mask.set(x, y, true);
    while let Some((cx, cy)) = queue.pop_front() {
        let mut visit = |nx: usize, ny: usize| {
            if !mask.get(nx, ny) && inside(nx, ny) {
                mask.set(nx, ny, true);
                queue.push_back((nx, ny));
            }
        };
        if cx > 0 {
            visit(cx - 1, cy);
        }
        if cx + 1 < obs.width() {
            visit(cx + 1, cy);
        }
        if cy > 0 {
            visit(cx, cy - 1);
        }
        if cy + 1 < obs.height() {
            visit(cx, cy + 1);
        }
    }
}

/// All connected regions whose intensity lies within the band around `level`.
pub fn components_matching(obs: &Observation, level: f64, object_id: &str) -> Vec<ObjectMask> {
    let mut seen = ObjectMask::empty(obs.width(), obs.height(), object_id);
    let mut out = Vec::new();
    for y in 0..obs.height() {
        for x in 0..obs.width() {
            let v = obs.get(OBJECT_PLANE, x, y);
            if seen.get(x, y) || v <= BACKGROUND_LEVEL || (v - level).abs() > APPEARANCE_TOLERANCE {
                continue;
            }
            let mut comp = ObjectMask::empty(obs.width(), obs.height(), object_id);
            flood(obs, &mut comp, x, y, level);
            seen.union_with(&comp).expect("same raster");
            out.push(comp);
        }
    }
    out
}

fn appearance(obs: &Observation, mask: &ObjectMask) -> Option<f64> {
    let vals: Vec<f64> = mask
        .bits()
        .iter()
        .zip(obs.plane(OBJECT_PLANE))
        .filter(|(b, v)| **b && **v > BACKGROUND_LEVEL)
        .map(|(_, v)| *v)
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Produces the first-frame mask of `object_id` and the tracker that will
/// follow it.
pub fn annotate_initial(
    obs0: &Observation,
    object_id: &str,
    prompt: &AnnotationPrompt,
    truth: Option<&dyn GroundTruth>,
    mode: TrackerMode,
    rng: &mut dyn RngCore,
) -> Result<(ObjectMask, TrackerState)> {
    prompt.validate(obs0)?;
    let mask = match prompt {
        AnnotationPrompt::Point { x, y } => {
            let m = component_at(obs0, *x, *y, object_id);
            if m.is_empty() {
                log::warn!("point prompt ({x}, {y}) for {object_id} landed on background");
            }
            m
        }
        AnnotationPrompt::Box { x0, y0, x1, y1 } => {
            let mut m = ObjectMask::empty(obs0.width(), obs0.height(), object_id);
            for y in *y0..*y1 {
                for x in *x0..*x1 {
                    if obs0.get(OBJECT_PLANE, x, y) > BACKGROUND_LEVEL {
                        m.set(x, y, true);
                    }
                }
            }
            m
        }
        AnnotationPrompt::Detector {
            label,
            miss_prob,
            jitter,
        } => {
            let truth = truth
                .ok_or_else(|| Error::InvalidPrompt("detector prompt needs ground truth".into()))?;
            let exact = truth.ground_truth(label)?;
            let missed = rng.random::<f64>() < *miss_prob;
            let mut m = if missed {
                ObjectMask::empty(obs0.width(), obs0.height(), object_id)
            } else if *jitter == 0 {
                exact
            } else {
                let j = *jitter as i64;
                let (dx, dy) = (rng.random_range(-j..=j), rng.random_range(-j..=j));
                let grow = rng.random_range(0..=*jitter);
                exact.translated(dx, dy).dilated(grow)
            };
            m.object_id = object_id.to_string();
            m
        }
    };
    let state = TrackerState {
        object_id: object_id.to_string(),
        last_mask: mask.clone(),
        mode,
        appearance: appearance(obs0, &mask),
        annotated: !mask.is_empty(),
    };
    Ok((mask, state))
}
