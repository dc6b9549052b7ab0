use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{PcdRunConfig, PolicyHandle};
use crate::action_dist::{
    contrastive_combine, contrastive_combine_multi, kde_estimate_marginals, kde_estimate_multi,
    select_action, select_index,
};
use crate::error::Result;
use crate::observation::Observation;
use crate::policy::PrefixContext;
use crate::simworld::{Scene, World};
use crate::track2mask::Masker;

const POLICY_STREAM: u64 = 20;
const MASKED_POLICY_STREAM: u64 = 21;
const MASK_STREAM: u64 = 22;
const SELECT_STREAM: u64 = 23;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Generator the episode uses for first-frame annotation.
pub(crate) fn mask_stream(seed: u64) -> ChaCha8Rng {
    stream(seed, MASK_STREAM)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Step counter after the action was applied.
    pub step: usize,
    pub action: Vec<f64>,
    pub success_now: bool,
    pub mask_cells: usize,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub success_completion: bool,
    pub success_maxstep: bool,
    pub total_steps: usize,
    /// Set when a component failed; the episode then counts as a failure.
    pub error: Option<String>,
}

impl EpisodeRecord {
    fn new(seed: u64) -> Self {
        EpisodeRecord {
            seed,
            steps: Vec::new(),
            success_completion: false,
            success_maxstep: false,
            total_steps: 0,
            error: None,
        }
    }

    fn finish(&mut self) {
        self.total_steps = self.steps.len();
        if self.error.is_none() {
            self.success_completion = self.steps.iter().any(|s| s.success_now);
            self.success_maxstep = self.steps.last().is_some_and(|s| s.success_now);
        }
    }

    /// Equality of everything except timings and mask sizes.
    pub fn same_trajectory(&self, other: &Self) -> bool {
        self.seed == other.seed
            && self.success_completion == other.success_completion
            && self.success_maxstep == other.success_maxstep
            && self.total_steps == other.total_steps
            && self.error == other.error
            && self.steps.len() == other.steps.len()
            && self.steps.iter().zip(&other.steps).all(|(a, b)| {
                a.step == b.step
                    && a.success_now == b.success_now
                    && a.action.len() == b.action.len()
                    && a.action
                        .iter()
                        .zip(&b.action)
                        .all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }

    pub fn wall_ms(&self) -> f64 {
        self.steps.iter().map(|s| s.duration_ms).sum()
    }
}

/// One episode with object masking and contrastive decoding.
pub fn run_pcd_episode(
    policy: &PolicyHandle,
    world: &World,
    cfg: &PcdRunConfig,
    seed: u64,
) -> EpisodeRecord {
    drive(policy, world, cfg, seed, true, &mut |_, _| {})
}

/// One episode of the unmodified policy, with the same selection rule and
/// random streams as [`run_pcd_episode`].
pub fn run_baseline_episode(
    policy: &PolicyHandle,
    world: &World,
    cfg: &PcdRunConfig,
    seed: u64,
) -> EpisodeRecord {
    drive(policy, world, cfg, seed, false, &mut |_, _| {})
}

/// Runs an episode, calling `observe` with the scene and chosen action
/// before each step.
pub fn drive(
    policy: &PolicyHandle,
    world: &World,
    cfg: &PcdRunConfig,
    seed: u64,
    contrast: bool,
    observe: &mut dyn FnMut(&Scene, &[f64]),
) -> EpisodeRecord {
    let mut record = EpisodeRecord::new(seed);
    if let Err(e) = drive_inner(policy, world, cfg, seed, contrast, observe, &mut record) {
        log::debug!("episode {seed} failed: {e}");
        record.error = Some(e.to_string());
    }
    record.finish();
    record
}

struct Streams {
    policy: ChaCha8Rng,
    masked: ChaCha8Rng,
    select: ChaCha8Rng,
}

fn drive_inner(
    policy: &PolicyHandle,
    world: &World,
    cfg: &PcdRunConfig,
    seed: u64,
    contrast: bool,
    observe: &mut dyn FnMut(&Scene, &[f64]),
    record: &mut EpisodeRecord,
) -> Result<()> {
    let (mut scene, mut obs) = world.reset(seed)?;
    let instr = &world.task.instruction;
    let mut rngs = Streams {
        policy: stream(seed, POLICY_STREAM),
        masked: stream(seed, MASKED_POLICY_STREAM),
        select: stream(seed, SELECT_STREAM),
    };
    let mut masker = match (contrast, policy) {
        (true, PolicyHandle::Distribution(_) | PolicyHandle::Sampler(_)) => {
            let mut mask_rng = mask_stream(seed);
            Some(Masker::start(
                &cfg.mask,
                &scene,
                &obs,
                &instr.target_labels,
                &mut mask_rng,
            )?)
        }
        _ => None,
    };
    loop {
        let start = Instant::now();
        let (masked, mask_cells) = match masker.as_mut() {
            Some(m) => {
                let (o, cells) = m.masked(&obs, Some(&scene))?;
                (Some(o), cells)
            }
            None => (None, 0),
        };
        let action = decide(policy, world, &scene, &obs, masked.as_ref(), cfg, &mut rngs)?;
        observe(&scene, &action);
        let (next, result) = world.step(&scene, &action)?;
        record.steps.push(StepRecord {
            step: result.step,
            action,
            success_now: result.success_now,
            mask_cells,
            duration_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        scene = next;
        obs = result.observation;
        if result.terminated {
            return Ok(());
        }
    }
}

fn decide(
    policy: &PolicyHandle,
    world: &World,
    scene: &Scene,
    obs: &Observation,
    masked: Option<&Observation>,
    cfg: &PcdRunConfig,
    rngs: &mut Streams,
) -> Result<Vec<f64>> {
    let instr = &world.task.instruction;
    match policy {
        PolicyHandle::Expert(e) => Ok(e.act(scene, &world.task)),
        PolicyHandle::Distribution(p) => {
            let mut prefix = PrefixContext::default();
            let mut action = Vec::with_capacity(p.arity());
            for _ in 0..p.arity() {
                let dist = p.predict(obs, instr, &prefix)?;
                let dist = match masked {
                    Some(m) => {
                        contrastive_combine(&dist, &p.predict(m, instr, &prefix)?, &cfg.decode)?
                    }
                    None => dist,
                };
                let k = select_index(&dist, cfg.decode.selection, &mut rngs.select);
                action.push(dist.grid().center(k));
                prefix.committed.push(k);
            }
            Ok(action)
        }
        PolicyHandle::Sampler(p) => {
            let n = cfg.kde.n_samples;
            let samples = p.sample(obs, instr, n, &mut rngs.policy)?;
            let dist = match masked {
                // With alpha = 0 the masked branch has no influence, and the
                // single-branch grid keeps decoding identical to the baseline.
                Some(m) if cfg.decode.alpha > 0.0 => {
                    let samples_masked = p.sample(m, instr, n, &mut rngs.masked)?;
                    let (orig, masked) = kde_estimate_multi(&samples, &cfg.kde, &samples_masked)?;
                    contrastive_combine_multi(&orig, &masked, &cfg.decode)?
                }
                _ => kde_estimate_marginals(&samples, &cfg.kde)?,
            };
            Ok(select_action(&dist, &cfg.decode, &mut rngs.select))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{PolicyKind, TaskConfig};
    use crate::simworld::TaskKind;

    fn cfg(kind: PolicyKind, task: TaskKind) -> PcdRunConfig {
        let mut c = PcdRunConfig::default();
        c.policy.kind = kind;
        c.task = TaskConfig {
            kind: task,
            max_steps: None,
        };
        c
    }

    #[test]
    fn expert_baseline_succeeds_and_reruns_identically() {
        let c = cfg(PolicyKind::Expert, TaskKind::PickPlace);
        let (policy, world) = (c.policy.build().unwrap(), c.world().unwrap());
        for seed in 0..10 {
            let r = run_baseline_episode(&policy, &world, &c, seed);
            assert!(r.success_completion, "seed {seed}");
            assert!(r.same_trajectory(&run_baseline_episode(&policy, &world, &c, seed)));
        }
    }

    #[test]
    fn zero_alpha_matches_baseline() {
        for kind in [PolicyKind::Autoregressive, PolicyKind::Diffusion] {
            let c = cfg(kind, TaskKind::Reach).with_alpha(0.0);
            let (policy, world) = (c.policy.build().unwrap(), c.world().unwrap());
            for seed in 0..3 {
                let a = run_pcd_episode(&policy, &world, &c, seed);
                let b = run_baseline_episode(&policy, &world, &c, seed);
                assert!(a.error.is_none());
                assert!(a.same_trajectory(&b), "{kind:?} seed {seed}");
                assert!(a.steps.iter().all(|s| s.mask_cells > 0));
            }
        }
    }

    #[test]
    fn component_error_is_a_failed_trial() {
        let mut c = cfg(PolicyKind::Autoregressive, TaskKind::Reach);
        c.mask.miss_prob = 2.0;
        let (policy, world) = (c.policy.build().unwrap(), c.world().unwrap());
        let r = run_pcd_episode(&policy, &world, &c, 0);
        assert!(r.error.is_some());
        assert!(!r.success_completion && !r.success_maxstep);
    }

    #[test]
    fn both_metrics_runs_to_the_step_limit() {
        let mut c = cfg(PolicyKind::Expert, TaskKind::Reach);
        c.both_metrics = true;
        let (policy, world) = (c.policy.build().unwrap(), c.world().unwrap());
        let r = run_baseline_episode(&policy, &world, &c, 1);
        assert_eq!(r.total_steps, 40);
        assert!(r.success_completion && r.success_maxstep);
    }
}
