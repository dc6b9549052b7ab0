use crate::simworld::{Scene, TaskKind, TaskSpec};

/// Privileged controller that reads the true scene: proportional steps
/// toward the current subgoal, clipped per axis to `step_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedExpert {
    pub step_max: f64,
    pub grasp_radius: f64,
    pub release_radius: f64,
}

impl Default for ScriptedExpert {
    fn default() -> Self {
        Self {
            step_max: 0.05,
            grasp_radius: 0.04,
            release_radius: 0.02,
        }
    }
}

const HOLD: f64 = 0.0;
const CLOSE: f64 = 1.0;
const OPEN: f64 = -1.0;

impl ScriptedExpert {
    fn toward(&self, from: [f64; 2], to: [f64; 2]) -> (f64, f64, f64) {
        let (dx, dy) = (to[0] - from[0], to[1] - from[1]);
        (
            dx.clamp(-self.step_max, self.step_max),
            dy.clamp(-self.step_max, self.step_max),
            (dx * dx + dy * dy).sqrt(),
        )
    }

    /// Action `[dx, dy, grip]` for the current scene.
    pub fn act(&self, scene: &Scene, task: &TaskSpec) -> Vec<f64> {
        let target = scene.target_object().pos;
        let g = scene.gripper;
        if task.kind == TaskKind::Reach {
            let (dx, dy, d) = self.toward(g, target);
            return if d <= task.success_radius {
                vec![0.0, 0.0, HOLD]
            } else {
                vec![dx, dy, HOLD]
            };
        }
        let Some(reference) = scene.reference_object().map(|r| r.pos) else {
            return vec![0.0, 0.0, HOLD];
        };
        if scene.holding_target() {
            let (dx, dy, d) = self.toward(g, reference);
            let grip = if d <= self.release_radius { OPEN } else { HOLD };
            return vec![dx, dy, grip];
        }
        let (_, _, placed) = self.toward(target, reference);
        if placed <= task.success_radius {
            return vec![0.0, 0.0, HOLD];
        }
        let (dx, dy, d) = self.toward(g, target);
        let grip = if d <= self.grasp_radius {
            if scene.closed {
                OPEN
            } else {
                CLOSE
            }
        } else if scene.closed {
            OPEN
        } else {
            HOLD
        };
        vec![dx, dy, grip]
    }
}
