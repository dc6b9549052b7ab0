use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    annotate_initial, inpaint, track, AnnotationPrompt, InpaintStrategy, ObjectMask, TrackerMode,
    TrackerState,
};
use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::simworld::{GroundTruth, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    /// Click at the object's centre cell.
    Point,
    /// Box around the object's footprint with a one-cell margin.
    Box,
    #[default]
    Detector,
}

impl PromptKind {
    pub fn name(self) -> &'static str {
        match self {
            PromptKind::Point => "point",
            PromptKind::Box => "box",
            PromptKind::Detector => "detector",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "point" => Ok(PromptKind::Point),
            "box" => Ok(PromptKind::Box),
            "detector" => Ok(PromptKind::Detector),
            other => Err(Error::InvalidConfig(format!("unknown prompt {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaskConfig {
    pub prompt: PromptKind,
    pub tracker: TrackerMode,
    pub inpaint: InpaintStrategy,
    pub miss_prob: f64,
    pub jitter: usize,
}

impl Default for MaskConfig {
    fn default() -> Self {
        MaskConfig {
            prompt: PromptKind::Detector,
            tracker: TrackerMode::Exact,
            inpaint: InpaintStrategy::BackgroundMeanFill,
            miss_prob: 0.0,
            jitter: 0,
        }
    }
}

impl MaskConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.miss_prob) {
            return Err(Error::InvalidConfig(format!(
                "miss_prob {} outside [0, 1]",
                self.miss_prob
            )));
        }
        self.inpaint.validate()
    }

    /// The prompt a user would give for `label` in the first frame.
    pub fn prompt_for(&self, scene: &Scene, label: &str) -> Result<AnnotationPrompt> {
        let obj = scene
            .objects
            .iter()
            .find(|o| o.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let (w, h) = scene.raster;
        Ok(match self.prompt {
            PromptKind::Point => {
                let x = ((obj.pos[0] * w as f64) as usize).min(w - 1);
                let y = ((obj.pos[1] * h as f64) as usize).min(h - 1);
                AnnotationPrompt::Point { x, y }
            }
            PromptKind::Box => {
                let cell =
                    |v: f64, n: usize| (v * n as f64).floor().clamp(0.0, n as f64 - 1.0) as usize;
                let x0 = cell(obj.pos[0] - obj.radius, w).saturating_sub(1);
                let y0 = cell(obj.pos[1] - obj.radius, h).saturating_sub(1);
                let x1 = (cell(obj.pos[0] + obj.radius, w) + 2).min(w);
                let y1 = (cell(obj.pos[1] + obj.radius, h) + 2).min(h);
                AnnotationPrompt::Box { x0, y0, x1, y1 }
            }
            PromptKind::Detector => AnnotationPrompt::Detector {
                label: label.to_string(),
                miss_prob: self.miss_prob,
                jitter: self.jitter,
            },
        })
    }
}

/// Per-episode masking state: one tracker per instruction label, masks
/// combined by union before inpainting.
#[derive(Debug, Clone)]
pub struct Masker {
    config: MaskConfig,
    trackers: Vec<TrackerState>,
    initial: Option<ObjectMask>,
}

impl Masker {
    /// Annotates every label in the first frame.
    pub fn start(
        config: &MaskConfig,
        scene: &Scene,
        obs0: &Observation,
        labels: &[String],
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        config.validate()?;
        let mut union = ObjectMask::empty(obs0.width(), obs0.height(), "union");
        let mut trackers = Vec::with_capacity(labels.len());
        for label in labels {
            let prompt = config.prompt_for(scene, label)?;
            let (mask, state) =
                annotate_initial(obs0, label, &prompt, Some(scene), config.tracker, rng)?;
            union.union_with(&mask)?;
            trackers.push(state);
        }
        Ok(Masker {
            config: config.clone(),
            trackers,
            initial: Some(union),
        })
    }

    pub fn config(&self) -> &MaskConfig {
        &self.config
    }

    /// Mask for `obs`: the annotation on the first call, tracked afterwards.
    pub fn mask(
        &mut self,
        obs: &Observation,
        truth: Option<&dyn GroundTruth>,
    ) -> Result<ObjectMask> {
        if let Some(m) = self.initial.take() {
            return Ok(m);
        }
        let mut union = ObjectMask::empty(obs.width(), obs.height(), "union");
        for t in &mut self.trackers {
            union.union_with(&track(t, obs, truth))?;
        }
        Ok(union)
    }

    /// The object-masked observation and the number of masked cells.
    pub fn masked(
        &mut self,
        obs: &Observation,
        truth: Option<&dyn GroundTruth>,
    ) -> Result<(Observation, usize)> {
        let m = self.mask(obs, truth)?;
        Ok((inpaint(obs, &m, self.config.inpaint)?, m.count()))
    }
}
