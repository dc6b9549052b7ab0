//! Object masking along a trajectory: annotate the instruction's objects in
//! the first frame, follow them frame to frame, and inpaint them away.

mod annotate;
mod inpaint;
mod mask;
mod pipeline;
mod tracker;

pub use annotate::{annotate_initial, component_at, components_matching, AnnotationPrompt};
pub use inpaint::{inpaint, InpaintStrategy};
pub use mask::ObjectMask;
pub use pipeline::{MaskConfig, Masker, PromptKind};
pub use tracker::{track, TrackerMode, TrackerState};

/// Half-width of the plane-0 intensity band treated as one object.
pub(crate) const APPEARANCE_TOLERANCE: f64 = 0.04;
/// Plane-0 values at or below this count as background.
pub(crate) const BACKGROUND_LEVEL: f64 = 1e-9;
