use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scene::dist;
use super::{
    class_intensity, render, LightPatch, Scene, SceneObject, ShiftSpec, SpuriousFactors, TaskKind,
    TaskSpec,
};
use crate::error::{Error, Result};
use crate::observation::Observation;

const PLACEMENT_ATTEMPTS: usize = 1000;
const LAYOUT_STREAM: u64 = 10;
const NUISANCE_STREAM: u64 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldParams {
    pub width: usize,
    pub height: usize,
    /// Per-axis displacement limit of one action.
    pub step_max: f64,
    pub grasp_radius: f64,
    pub object_radius: f64,
    pub zone_radius: f64,
    pub light_spread: f64,
    /// Maximum light-to-target distance in training layouts.
    pub colocation_radius: f64,
    pub min_separation: f64,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            width: 32,
            height: 32,
            step_max: 0.05,
            grasp_radius: 0.05,
            object_radius: 0.06,
            zone_radius: 0.08,
            light_spread: 0.06,
            colocation_radius: 0.05,
            min_separation: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub success_now: bool,
    pub terminated: bool,
    pub step: usize,
}

/// A task under a given shift. Stateless; scenes are passed by value.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub task: TaskSpec,
    pub shift: ShiftSpec,
    pub params: WorldParams,
    /// End the episode at the first successful step.
    pub terminate_on_success: bool,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn uniform_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> [f64; 2] {
    [rng.random_range(lo..hi), rng.random_range(lo..hi)]
}

impl World {
    pub fn new(task: TaskSpec, shift: ShiftSpec) -> Result<Self> {
        task.validate()?;
        shift.validate()?;
        Ok(Self {
            task,
            shift,
            params: WorldParams::default(),
            terminate_on_success: true,
        })
    }

    pub fn with_params(mut self, params: WorldParams) -> Self {
        self.params = params;
        self
    }

    fn object(&self, label: &str, pos: [f64; 2]) -> SceneObject {
        let zone = label == "goal_zone";
        SceneObject {
            label: label.to_string(),
            pos,
            radius: if zone {
                self.params.zone_radius
            } else {
                self.params.object_radius
            },
            intensity: class_intensity(label).expect("validated label"),
            graspable: !zone,
        }
    }

    fn place(
        &self,
        rng: &mut ChaCha8Rng,
        range: (f64, f64),
        keep_away: &[([f64; 2], f64)],
    ) -> Result<[f64; 2]> {
        for _ in 0..PLACEMENT_ATTEMPTS {
            let p = uniform_point(rng, range.0, range.1);
            if keep_away.iter().all(|(q, d)| dist(p, *q) >= *d) {
                return Ok(p);
            }
        }
        Err(Error::Placement(PLACEMENT_ATTEMPTS))
    }

    /// Samples the initial scene. Layout and nuisance factors use separate
    /// random streams derived from `seed`.
    pub fn reset(&self, seed: u64) -> Result<(Scene, Observation)> {
        let p = &self.params;
        let mut layout = stream(seed, LAYOUT_STREAM);
        let mut nuisance = stream(seed, NUISANCE_STREAM);
        let spatial = matches!(self.shift, ShiftSpec::Spatial);
        let (range, start_gap) = if spatial {
            ((0.05, 0.95), 0.4)
        } else {
            ((0.15, 0.85), 0.25)
        };

        let gripper = uniform_point(&mut layout, 0.1, 0.9);
        let sep = p.min_separation;
        let target_pos = self.place(&mut layout, range, &[(gripper, start_gap)])?;
        let mut objects = vec![self.object(&self.task.target, target_pos)];
        let mut taken = vec![(target_pos, sep)];
        let mut reference = None;
        if let Some(label) = &self.task.reference {
            let ref_gap = if spatial { 0.4 } else { sep };
            let pos = self.place(&mut layout, range, &[(gripper, sep), (target_pos, ref_gap)])?;
            reference = Some(objects.len());
            objects.push(self.object(label, pos));
            taken.push((pos, sep));
        }
        if let Some(label) = &self.task.clutter {
            let pos = self.place(&mut layout, range, &taken)?;
            objects.push(self.object(label, pos));
            taken.push((pos, sep));
        }

        let offset_r = p.colocation_radius * nuisance.random::<f64>().sqrt();
        let offset_a = nuisance.random_range(0.0..std::f64::consts::TAU);
        let mut light_pos = if self.shift.decorrelates_light() {
            uniform_point(&mut nuisance, 0.1, 0.9)
        } else {
            [
                target_pos[0] + offset_r * offset_a.cos(),
                target_pos[1] + offset_r * offset_a.sin(),
            ]
        };
        light_pos = [light_pos[0].clamp(0.0, 1.0), light_pos[1].clamp(0.0, 1.0)];
        let light = LightPatch {
            pos: light_pos,
            intensity: nuisance.random_range(0.35..0.65),
            spread: p.light_spread,
        };

        let mut spurious = SpuriousFactors {
            light,
            brightness_offset: 0.0,
            texture: 0,
            distractors: vec![],
        };
        match &self.shift {
            ShiftSpec::Brightness { offset, .. } => spurious.brightness_offset = *offset,
            ShiftSpec::Texture { pattern } => spurious.texture = *pattern,
            ShiftSpec::Distractors { count, class } => {
                for _ in 0..*count {
                    let pos = self.place(&mut nuisance, (0.05, 0.95), &taken)?;
                    spurious.distractors.push(objects.len());
                    objects.push(self.object(class, pos));
                    taken.push((pos, sep));
                }
            }
            ShiftSpec::None | ShiftSpec::Spatial => {}
        }

        let scene = Scene {
            gripper,
            closed: false,
            objects,
            held: None,
            spurious,
            step: 0,
            terminated: false,
            target: 0,
            reference,
            raster: (p.width, p.height),
        };
        let obs = render(&scene);
        Ok((scene, obs))
    }

    /// Task success, evaluated from gripper and object geometry only.
    pub fn success(&self, scene: &Scene) -> bool {
        let target = scene.target_object();
        match self.task.kind {
            TaskKind::Reach => dist(scene.gripper, target.pos) <= self.task.success_radius,
            TaskKind::PickPlace | TaskKind::MoveNear | TaskKind::Stack => {
                match scene.reference_object() {
                    Some(r) => {
                        scene.held.is_none() && dist(target.pos, r.pos) <= self.task.success_radius
                    }
                    None => false,
                }
            }
        }
    }

    /// Applies `[dx, dy, grip]`. Displacements are clipped per axis to
    /// `step_max`; `grip > 0.25` closes, `grip < -0.25` opens, anything
    /// in between holds the current state.
    pub fn step(&self, scene: &Scene, action: &[f64]) -> Result<(Scene, StepResult)> {
        if scene.terminated {
            return Err(Error::Terminated);
        }
        if action.len() != 3 {
            return Err(Error::ActionArity {
                expected: 3,
                got: action.len(),
            });
        }
        if action.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidConfig(
                "action contains non-finite values".into(),
            ));
        }
        let mut next = scene.clone();
        let m = self.params.step_max;
        next.gripper = [
            (scene.gripper[0] + action[0].clamp(-m, m)).clamp(0.0, 1.0),
            (scene.gripper[1] + action[1].clamp(-m, m)).clamp(0.0, 1.0),
        ];
        if let Some(i) = next.held {
            next.objects[i].pos = next.gripper;
        }
        if action[2] > 0.25 && !next.closed {
            next.closed = true;
            next.held = next
                .objects
                .iter()
                .enumerate()
                .filter(|(_, o)| o.graspable)
                .map(|(i, o)| (i, dist(o.pos, next.gripper)))
                .filter(|(_, d)| *d <= self.params.grasp_radius)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i);
            if let Some(i) = next.held {
                next.objects[i].pos = next.gripper;
            }
        } else if action[2] < -0.25 && next.closed {
            next.closed = false;
            next.held = None;
        }
        next.step += 1;
        let success_now = self.success(&next);
        next.terminated =
            (self.terminate_on_success && success_now) || next.step >= self.task.max_steps;
        let observation = render(&next);
        let result = StepResult {
            observation,
            success_now,
            terminated: next.terminated,
            step: next.step,
        };
        Ok((next, result))
    }
}
