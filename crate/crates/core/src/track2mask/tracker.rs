use serde::{Deserialize, Serialize};

use super::annotate::components_matching;
use super::ObjectMask;
use crate::observation::Observation;
use crate::simworld::GroundTruth;

/// Matches farther than this many cells from the previous centroid are
/// rejected and the previous mask is kept.
pub const MATCH_RADIUS_CELLS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackerMode {
    /// Reads the simulator's ground-truth footprint every step.
    #[default]
    Exact,
    /// Follows the blob of matching intensity nearest the previous centroid.
    NearestMatch,
}

impl TrackerMode {
    pub fn name(self) -> &'static str {
        match self {
            TrackerMode::Exact => "exact",
            TrackerMode::NearestMatch => "nearest_match",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    pub object_id: String,
    pub last_mask: ObjectMask,
    pub mode: TrackerMode,
    /// Mean plane-0 intensity under the initial mask.
    pub appearance: Option<f64>,
    /// False when the initial annotation came back empty; such a tracker
    /// never recovers the object.
    pub annotated: bool,
}

/// Propagates the mask to `obs`. Whenever no better estimate exists the
/// previous mask is returned unchanged.
pub fn track(
    state: &mut TrackerState,
    obs: &Observation,
    truth: Option<&dyn GroundTruth>,
) -> ObjectMask {
    if !state.annotated {
        return state.last_mask.clone();
    }
    let next = match state.mode {
        TrackerMode::Exact => match truth.map(|t| t.ground_truth(&state.object_id)) {
            Some(Ok(m)) => Some(m),
            Some(Err(e)) => {
                log::warn!("exact tracking of {} failed: {e}", state.object_id);
                None
            }
            None => {
                log::warn!("exact tracking of {} without ground truth", state.object_id);
                None
            }
        },
        TrackerMode::NearestMatch => nearest_match(state, obs),
    };
    if let Some(mut m) = next {
        m.object_id = state.object_id.clone();
        state.last_mask = m;
    }
    state.last_mask.clone()
}

fn nearest_match(state: &TrackerState, obs: &Observation) -> Option<ObjectMask> {
    let level = state.appearance?;
    let prev = state.last_mask.centroid()?;
    components_matching(obs, level, &state.object_id)
        .into_iter()
        .filter_map(|m| {
            let c = m.centroid()?;
            let d = (c[0] - prev[0]).hypot(c[1] - prev[1]);
            (d <= MATCH_RADIUS_CELLS).then_some((d, m))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, m)| m)
}
