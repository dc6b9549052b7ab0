use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::track2mask::ObjectMask;

/// Known object labels and their plane-0 class intensities.
pub const CATALOG: &[(&str, f64)] = &[
    ("red_block", 0.9),
    ("green_block", 0.75),
    ("yellow_block", 0.6),
    ("goal_zone", 0.45),
    ("blue_cup", 0.3),
];

pub fn class_intensity(label: &str) -> Option<f64> {
    CATALOG.iter().find(|(l, _)| *l == label).map(|(_, v)| *v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub label: String,
    pub pos: [f64; 2],
    pub radius: f64,
    pub intensity: f64,
    pub graspable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightPatch {
    pub pos: [f64; 2],
    /// Peak height of the bump above the ambient level.
    pub intensity: f64,
    pub spread: f64,
}

/// Task-irrelevant factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpuriousFactors {
    pub light: LightPatch,
    pub brightness_offset: f64,
    pub texture: u32,
    /// Indices into [`Scene::objects`].
    pub distractors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub gripper: [f64; 2],
    pub closed: bool,
    pub objects: Vec<SceneObject>,
    /// Index of the object currently in the gripper.
    pub held: Option<usize>,
    pub spurious: SpuriousFactors,
    pub step: usize,
    pub terminated: bool,
    /// Index of the object the instruction manipulates.
    pub target: usize,
    /// Index of the destination or reference object, if the task has one.
    pub reference: Option<usize>,
    pub raster: (usize, usize),
}

impl Scene {
    pub fn target_object(&self) -> &SceneObject {
        &self.objects[self.target]
    }

    pub fn reference_object(&self) -> Option<&SceneObject> {
        self.reference.map(|i| &self.objects[i])
    }

    pub fn holding_target(&self) -> bool {
        self.held == Some(self.target)
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.objects.iter().any(|o| o.label == label)
    }
}

/// Source of exact object footprints.
pub trait GroundTruth {
    fn ground_truth(&self, label: &str) -> Result<ObjectMask>;
}

impl GroundTruth for Scene {
    fn ground_truth(&self, label: &str) -> Result<ObjectMask> {
        super::ground_truth_mask(self, label)
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn unknown(label: &str) -> Error {
    Error::UnknownLabel(label.to_string())
}
