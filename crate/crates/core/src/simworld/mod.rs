//! Planar tabletop world with separable task-relevant and task-irrelevant
//! scene factors.
//!
//! Task geometry (gripper, target, reference) is drawn from one random
//! stream and the nuisance factors (light patch, brightness, texture,
//! distractors) from another, so a [`ShiftSpec`] can resample the nuisance
//! factors without touching the layout.

mod render;
mod scene;
mod shift;
mod task;
mod world;

pub use render::{ground_truth_mask, render, write_ppm};
pub use scene::{
    class_intensity, GroundTruth, LightPatch, Scene, SceneObject, SpuriousFactors, CATALOG,
};
pub use shift::ShiftSpec;
pub use task::{TaskKind, TaskSpec};
pub use world::{StepResult, World, WorldParams};
