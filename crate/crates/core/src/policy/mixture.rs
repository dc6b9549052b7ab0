use serde::{Deserialize, Serialize};

use super::perception::{perceive, Percept};
use super::{DistributionPolicy, Instruction, PrefixContext, ACTION_DIMS};
use crate::action_dist::{ActionDistribution, BinGrid, CategoricalDist};
use crate::error::{Error, Result};
use crate::observation::Observation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpuriousMixtureParams {
    /// Weight of the light-following behavior.
    pub lambda: f64,
    /// Concentration of the displacement distributions; the kernel standard
    /// deviation is `1 / sqrt(sharpness)` bins.
    pub sharpness: f64,
    /// Bins per displacement dimension.
    pub action_bins: usize,
    pub step_max: f64,
    /// Probability mass a branch puts on its preferred gripper state.
    pub grip_confidence: f64,
    /// Light contrast at which the light branch has the nominal sharpness.
    pub nominal_contrast: f64,
    pub grasp_radius: f64,
    pub release_radius: f64,
    /// Target-to-reference distance treated as task complete.
    pub done_radius: f64,
}

impl Default for SpuriousMixtureParams {
    fn default() -> Self {
        Self {
            lambda: 0.6,
            sharpness: 1.0,
            action_bins: 21,
            step_max: 0.05,
            grip_confidence: 0.9,
            nominal_contrast: 0.5,
            grasp_radius: 0.04,
            release_radius: 0.02,
            done_radius: 0.08,
        }
    }
}

impl SpuriousMixtureParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "policy.lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if !(self.sharpness > 0.0 && self.sharpness.is_finite()) {
            return Err(Error::InvalidConfig(
                "policy.sharpness must be positive and finite".into(),
            ));
        }
        if self.action_bins < 2 {
            return Err(Error::InvalidConfig(
                "policy.bins must be at least 2".into(),
            ));
        }
        if !(0.5..1.0).contains(&self.grip_confidence) {
            return Err(Error::InvalidConfig(
                "grip_confidence must lie in [0.5, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Kernel width of the object branch, in bins.
    pub fn base_std_bins(&self) -> f64 {
        1.0 / self.sharpness.sqrt()
    }

    /// Kernel width of the light branch: fainter light, wider kernel.
    pub fn light_std_bins(&self, contrast: f64) -> f64 {
        self.base_std_bins() * (self.nominal_contrast / contrast).clamp(0.5, 4.0)
    }

    pub fn displacement_grid(&self) -> BinGrid {
        BinGrid::new(-self.step_max, self.step_max, self.action_bins).expect("validated params")
    }

    pub fn grip_grid(&self) -> BinGrid {
        BinGrid::new(-1.0, 1.0, 2).expect("static grid")
    }
}

/// What one behavior wants to do at this step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Desire {
    pub dx: f64,
    pub dy: f64,
    pub close: bool,
    /// Kernel width in bins.
    pub std_bins: f64,
}

/// Desires of the object and light behaviors; `None` means the observation
/// carries nothing for that behavior to act on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTargets {
    pub object: Option<Desire>,
    pub light: Option<Desire>,
}

fn norm(d: [f64; 2]) -> f64 {
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

impl BranchTargets {
    pub fn from_percept(p: &Percept, params: &SpuriousMixtureParams) -> Self {
        let g = p.proprio.gripper;
        let std = params.base_std_bins();
        let toward = |goal: [f64; 2], close: bool, std_bins: f64| Desire {
            dx: goal[0] - g[0],
            dy: goal[1] - g[1],
            close,
            std_bins,
        };
        let object = if p.proprio.holding {
            if !p.expects_reference {
                Some(Desire {
                    dx: 0.0,
                    dy: 0.0,
                    close: true,
                    std_bins: std,
                })
            } else {
                p.reference.map(|r| {
                    let d = [r[0] - g[0], r[1] - g[1]];
                    toward(r, norm(d) > params.release_radius, std)
                })
            }
        } else {
            p.target.map(|t| match p.reference {
                Some(r)
                    if p.expects_reference
                        && norm([t[0] - r[0], t[1] - r[1]]) <= params.done_radius =>
                {
                    Desire {
                        dx: 0.0,
                        dy: 0.0,
                        close: false,
                        std_bins: std,
                    }
                }
                _ => {
                    let d = [t[0] - g[0], t[1] - g[1]];
                    toward(t, !p.proprio.closed && norm(d) <= params.grasp_radius, std)
                }
            })
        };
        let light = match (p.light, p.proprio.holding) {
            (Some(cue), false) => {
                let d = [cue.pos[0] - g[0], cue.pos[1] - g[1]];
                let close = !p.proprio.closed && norm(d) <= params.grasp_radius;
                Some(toward(cue.pos, close, params.light_std_bins(cue.contrast)))
            }
            _ => None,
        };
        Self { object, light }
    }
}

fn displacement_dist(grid: BinGrid, d: f64, std_bins: f64) -> CategoricalDist {
    let target = d.clamp(grid.lower(), grid.upper());
    let sd = std_bins * grid.width();
    let log_w: Vec<f64> = grid
        .centers()
        .map(|c| -0.5 * ((c - target) / sd).powi(2))
        .collect();
    CategoricalDist::from_log_weights(grid, &log_w).expect("finite kernel")
}

fn grip_dist(grid: BinGrid, close: bool, confidence: f64) -> CategoricalDist {
    let probs = if close {
        vec![1.0 - confidence, confidence]
    } else {
        vec![confidence, 1.0 - confidence]
    };
    CategoricalDist::new(grid, probs).expect("valid grip probabilities")
}

/// Per-dimension distributions of one behavior, uniform when it has no desire.
pub(crate) fn branch_distribution(
    desire: Option<Desire>,
    params: &SpuriousMixtureParams,
) -> ActionDistribution {
    let (dg, gg) = (params.displacement_grid(), params.grip_grid());
    let dims = match desire {
        Some(d) => vec![
            displacement_dist(dg, d.dx, d.std_bins),
            displacement_dist(dg, d.dy, d.std_bins),
            grip_dist(gg, d.close, params.grip_confidence),
        ],
        None => vec![
            CategoricalDist::uniform(dg),
            CategoricalDist::uniform(dg),
            CategoricalDist::uniform(gg),
        ],
    };
    ActionDistribution::new(dims).expect("three dimensions")
}

/// Mixture `(1 - λ)·object + λ·light` of two product distributions, decoded
/// autoregressively: dimension `t` is the mixture of the branch marginals
/// reweighted by each branch's likelihood of the committed prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpuriousMixturePolicy {
    pub params: SpuriousMixtureParams,
}

impl SpuriousMixturePolicy {
    pub fn new(params: SpuriousMixtureParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    /// Object and light branch distributions for an observation.
    pub fn branches(
        &self,
        obs: &Observation,
        instr: &Instruction,
    ) -> Result<(ActionDistribution, ActionDistribution)> {
        let targets = BranchTargets::from_percept(&perceive(obs, instr)?, &self.params);
        Ok((
            branch_distribution(targets.object, &self.params),
            branch_distribution(targets.light, &self.params),
        ))
    }
}

impl DistributionPolicy for SpuriousMixturePolicy {
    fn arity(&self) -> usize {
        ACTION_DIMS
    }

    fn alphabet(&self, t: usize) -> BinGrid {
        if t + 1 < ACTION_DIMS {
            self.params.displacement_grid()
        } else {
            self.params.grip_grid()
        }
    }

    fn predict(
        &self,
        obs: &Observation,
        instr: &Instruction,
        prefix: &PrefixContext,
    ) -> Result<CategoricalDist> {
        let t = prefix.len();
        if t >= ACTION_DIMS {
            return Err(Error::PrefixTooLong {
                prefix: t,
                dims: ACTION_DIMS,
            });
        }
        let (object, light) = self.branches(obs, instr)?;
        let lambda = self.params.lambda;
        let likelihood = |b: &ActionDistribution| -> Result<f64> {
            let mut l = 1.0;
            for (s, &k) in prefix.committed.iter().enumerate() {
                let probs = b.dim(s).probs();
                l *= *probs.get(k).ok_or_else(|| {
                    Error::InvalidConfig(format!("prefix bin {k} out of range for dimension {s}"))
                })?;
            }
            Ok(l)
        };
        let mut w_obj = (1.0 - lambda) * likelihood(&object)?;
        let mut w_light = lambda * likelihood(&light)?;
        let total = w_obj + w_light;
        if total > 0.0 {
            w_obj /= total;
            w_light /= total;
        } else {
            w_obj = 1.0 - lambda;
            w_light = lambda;
        }
        let weights: Vec<f64> = object
            .dim(t)
            .probs()
            .iter()
            .zip(light.dim(t).probs())
            .map(|(a, b)| w_obj * a + w_light * b)
            .collect();
        CategoricalDist::from_weights(*object.dim(t).grid(), weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::LIGHT_PLANE;
    use crate::simworld::ground_truth_mask;
    use crate::simworld::{ShiftSpec, TaskKind, TaskSpec, World};
    use crate::track2mask::{inpaint, InpaintStrategy};

    fn policy(lambda: f64) -> SpuriousMixturePolicy {
        SpuriousMixturePolicy::new(SpuriousMixtureParams {
            lambda,
            ..Default::default()
        })
        .unwrap()
    }

    fn scene_obs(
        seed: u64,
        shift: ShiftSpec,
    ) -> (crate::simworld::Scene, Observation, Instruction) {
        let w = World::new(TaskSpec::new(TaskKind::Reach), shift).unwrap();
        let (s, o) = w.reset(seed).unwrap();
        (s, o, w.task.instruction.clone())
    }

    fn masked(scene: &crate::simworld::Scene, obs: &Observation) -> Observation {
        let m = ground_truth_mask(scene, "red_block").unwrap();
        inpaint(obs, &m, InpaintStrategy::BackgroundMeanFill).unwrap()
    }

    fn shift_light(obs: &Observation, dx: usize) -> Observation {
        let mut out = obs.clone();
        let w = obs.width();
        for y in 0..obs.height() {
            for x in 0..w {
                out.set(LIGHT_PLANE, x, y, obs.get(LIGHT_PLANE, (x + w - dx) % w, y));
            }
        }
        out
    }

    #[test]
    fn lambda_zero_ignores_light() {
        let (_, obs, instr) = scene_obs(3, ShiftSpec::parse("brightness").unwrap());
        let moved = shift_light(&obs, 9);
        let p = policy(0.0);
        let mut prefix = PrefixContext::default();
        for _ in 0..3 {
            let a = p.predict(&obs, &instr, &prefix).unwrap();
            let b = p.predict(&moved, &instr, &prefix).unwrap();
            assert_eq!(a, b);
            prefix.committed.push(a.argmax());
        }
    }

    #[test]
    fn positive_lambda_follows_light() {
        let (_, obs, instr) = scene_obs(3, ShiftSpec::parse("brightness").unwrap());
        let moved = shift_light(&obs, 9);
        let p = policy(0.6);
        let a = p.predict(&obs, &instr, &PrefixContext::default()).unwrap();
        let b = p
            .predict(&moved, &instr, &PrefixContext::default())
            .unwrap();
        assert!(a.total_variation(&b) > 1e-3);
    }

    #[test]
    fn lambda_one_on_masked_is_light_branch() {
        let (s, obs, instr) = scene_obs(4, ShiftSpec::parse("spatial").unwrap());
        let m = masked(&s, &obs);
        let p = policy(1.0);
        let (_, light) = p.branches(&m, &instr).unwrap();
        let out = p.predict(&m, &instr, &PrefixContext::default()).unwrap();
        for (a, b) in out.probs().iter().zip(light.dim(0).probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn masked_mixture_is_uniform_plus_light() {
        let (s, obs, instr) = scene_obs(5, ShiftSpec::parse("spatial").unwrap());
        let m = masked(&s, &obs);
        let p = policy(0.6);
        let (object, light) = p.branches(&m, &instr).unwrap();
        // object branch has nothing to see once the target is inpainted
        assert_eq!(
            object.dim(0),
            &CategoricalDist::uniform(p.params.displacement_grid())
        );
        let out = p.predict(&m, &instr, &PrefixContext::default()).unwrap();
        let uniform = 1.0 / 21.0;
        for (a, l) in out.probs().iter().zip(light.dim(0).probs()) {
            assert!((a - (0.4 * uniform + 0.6 * l)).abs() < 1e-12);
        }
    }

    #[test]
    fn masking_changes_output_when_target_visible() {
        for seed in 0..20 {
            let (s, obs, instr) = scene_obs(seed, ShiftSpec::parse("brightness").unwrap());
            let m = masked(&s, &obs);
            for lambda in [0.0, 0.3, 0.9] {
                let p = policy(lambda);
                let a = p.predict(&obs, &instr, &PrefixContext::default()).unwrap();
                let b = p.predict(&m, &instr, &PrefixContext::default()).unwrap();
                assert!(a.total_variation(&b) > 0.0);
            }
        }
    }

    #[test]
    fn prefix_too_long() {
        let (_, obs, instr) = scene_obs(1, ShiftSpec::None);
        let prefix = PrefixContext {
            committed: vec![0, 0, 0],
        };
        assert!(matches!(
            policy(0.5).predict(&obs, &instr, &prefix),
            Err(Error::PrefixTooLong { .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(SpuriousMixturePolicy::new(SpuriousMixtureParams {
            lambda: 1.2,
            ..Default::default()
        })
        .is_err());
        assert!(SpuriousMixturePolicy::new(SpuriousMixtureParams {
            sharpness: 0.0,
            ..Default::default()
        })
        .is_err());
    }
}
