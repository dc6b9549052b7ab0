use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::mixture::{BranchTargets, Desire, SpuriousMixtureParams};
use super::perception::perceive;
use super::{Instruction, SamplerPolicy, ACTION_DIMS};
use crate::error::{Error, Result};
use crate::observation::Observation;

const COSINE_OFFSET: f64 = 0.008;
const MAX_BETA: f64 = 0.999;

/// Variance of the noise injected at each reverse step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseVariance {
    /// `β[k] · (1 - ᾱ[k-1]) / (1 - ᾱ[k])`; slightly under-dispersed at small K.
    #[default]
    Posterior,
    /// `β[k]`; slightly over-dispersed at small K.
    Forward,
}

/// Per-step coefficients of the reverse update
/// `a[k-1] = alpha[k] * (a[k] - gamma[k] * eps(a[k], k)) + sigma[k] * z`.
///
/// Vectors are indexed by `k - 1` for `k` in `1..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSchedule {
    pub steps: usize,
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Cumulative signal fraction after `k` noising steps.
    pub alpha_bar: Vec<f64>,
}

impl DiffusionSchedule {
    /// Cosine schedule `ᾱ(t) ∝ cos²(((t/K + s) / (1 + s)) · π/2)` with
    /// per-step betas capped at 0.999 and posterior variance
    /// `β[k] · (1 - ᾱ[k-1]) / (1 - ᾱ[k])`.
    pub fn cosine(steps: usize) -> Result<Self> {
        Self::cosine_with(steps, NoiseVariance::Posterior)
    }

    pub fn cosine_with(steps: usize, variance: NoiseVariance) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig(
                "diffusion steps must be at least 1".into(),
            ));
        }
        let f = |t: f64| {
            let x = (t / steps as f64 + COSINE_OFFSET) / (1.0 + COSINE_OFFSET)
                * std::f64::consts::FRAC_PI_2;
            x.cos().powi(2)
        };
        let f0 = f(0.0);
        let mut alpha = Vec::with_capacity(steps);
        let mut gamma = Vec::with_capacity(steps);
        let mut sigma = Vec::with_capacity(steps);
        let mut alpha_bar = Vec::with_capacity(steps);
        let mut prev_bar = 1.0;
        for k in 1..=steps {
            let beta = (1.0 - (f(k as f64) / f0) / (f((k - 1) as f64) / f0)).clamp(0.0, MAX_BETA);
            let bar = prev_bar * (1.0 - beta);
            alpha.push(1.0 / (1.0 - beta).sqrt());
            gamma.push(beta / (1.0 - bar).sqrt());
            sigma.push(match variance {
                NoiseVariance::Posterior => (beta * (1.0 - prev_bar) / (1.0 - bar)).sqrt(),
                NoiseVariance::Forward => beta.sqrt(),
            });
            alpha_bar.push(bar);
            prev_bar = bar;
        }
        Ok(Self {
            steps,
            alpha,
            gamma,
            sigma,
            alpha_bar,
        })
    }

    pub fn from_parts(
        alpha: Vec<f64>,
        gamma: Vec<f64>,
        sigma: Vec<f64>,
        alpha_bar: Vec<f64>,
    ) -> Result<Self> {
        let steps = alpha.len();
        if steps == 0 || gamma.len() != steps || sigma.len() != steps || alpha_bar.len() != steps {
            return Err(Error::InvalidConfig(
                "schedule vectors must share a non-zero length".into(),
            ));
        }
        if sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::InvalidConfig(
                "schedule sigma must be non-negative".into(),
            ));
        }
        Ok(Self {
            steps,
            alpha,
            gamma,
            sigma,
            alpha_bar,
        })
    }
}

/// Noise prediction `ε(a, k)` used by the reverse update.
pub trait NoisePredictor {
    fn predict_noise(&self, a: &[f64], alpha_bar: f64) -> Vec<f64>;
}

/// Diagonal Gaussian mixture whose noised marginals are known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub stds: Vec<Vec<f64>>,
}

impl GaussianMixture {
    pub fn single(mean: Vec<f64>, std: Vec<f64>) -> Self {
        Self {
            weights: vec![1.0],
            means: vec![mean],
            stds: vec![std],
        }
    }
}

impl NoisePredictor for GaussianMixture {
    /// `-sqrt(1 - ᾱ) · ∇ log p_ᾱ(a)` where `p_ᾱ` is the mixture pushed
    /// through the forward process: component means scale by `sqrt(ᾱ)` and
    /// variances become `ᾱ·s² + 1 - ᾱ`.
    fn predict_noise(&self, a: &[f64], alpha_bar: f64) -> Vec<f64> {
        let scale = alpha_bar.sqrt();
        let noise_var = 1.0 - alpha_bar;
        let mut log_resp = Vec::with_capacity(self.weights.len());
        let mut grads = Vec::with_capacity(self.weights.len());
        for ((w, mean), std) in self.weights.iter().zip(&self.means).zip(&self.stds) {
            let mut lp = w.ln();
            let mut grad = Vec::with_capacity(a.len());
            for ((x, m), s) in a.iter().zip(mean).zip(std) {
                let var = alpha_bar * s * s + noise_var;
                let diff = x - scale * m;
                lp -= 0.5 * (diff * diff / var + var.ln());
                grad.push(-diff / var);
            }
            log_resp.push(lp);
            grads.push(grad);
        }
        let max = log_resp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let resp: Vec<f64> = log_resp.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = resp.iter().sum();
        let sd = noise_var.sqrt();
        (0..a.len())
            .map(|d| -sd * resp.iter().zip(&grads).map(|(r, g)| r * g[d]).sum::<f64>() / total)
            .collect()
    }
}

/// One reverse step from level `k` (1-based) to `k - 1`.
pub fn denoise_step(
    a: &[f64],
    k: usize,
    schedule: &DiffusionSchedule,
    predictor: &dyn NoisePredictor,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if k == 0 || k > schedule.steps {
        return Err(Error::InvalidStep {
            step: k,
            steps: schedule.steps,
        });
    }
    let i = k - 1;
    let eps = predictor.predict_noise(a, schedule.alpha_bar[i]);
    let (alpha, gamma, sigma) = (schedule.alpha[i], schedule.gamma[i], schedule.sigma[i]);
    Ok(a.iter()
        .zip(&eps)
        .map(|(x, e)| {
            let mean = alpha * (x - gamma * e);
            if sigma > 0.0 {
                let z: f64 = StandardNormal.sample(rng);
                mean + sigma * z
            } else {
                mean
            }
        })
        .collect())
}

/// Full reverse chain from `N(0, I)` down to level 0.
pub fn sample_chain(
    dims: usize,
    schedule: &DiffusionSchedule,
    predictor: &dyn NoisePredictor,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    let mut a: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(rng)).collect();
    for k in (1..=schedule.steps).rev() {
        a = denoise_step(&a, k, schedule, predictor, rng)?;
    }
    Ok(a)
}

/// Standard deviation of a behavior with nothing to act on, in normalized units.
const VAGUE_STD: f64 = 0.6;

/// Sample-only counterpart of [`super::SpuriousMixturePolicy`]: actions are
/// drawn by reverse diffusion against the mixture
/// `(1 - λ)·N(object desire) + λ·N(light desire)` in normalized action
/// units (displacements divided by `step_max`, gripper in `±0.5`).
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDiffusionPolicy {
    pub params: SpuriousMixtureParams,
    pub schedule: DiffusionSchedule,
}

impl MixtureDiffusionPolicy {
    pub fn new(params: SpuriousMixtureParams, steps: usize) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            schedule: DiffusionSchedule::cosine(steps)?,
        })
    }

    fn component(&self, desire: Option<Desire>) -> (Vec<f64>, Vec<f64>) {
        let bin = 2.0 / self.params.action_bins as f64;
        match desire {
            Some(d) => {
                let m = self.params.step_max;
                let grip = if d.close { 0.5 } else { -0.5 };
                let sd = d.std_bins * bin;
                (
                    vec![
                        (d.dx / m).clamp(-1.0, 1.0),
                        (d.dy / m).clamp(-1.0, 1.0),
                        grip,
                    ],
                    vec![sd; ACTION_DIMS],
                )
            }
            None => (vec![0.0; ACTION_DIMS], vec![VAGUE_STD; ACTION_DIMS]),
        }
    }

    /// Target mixture in normalized units for an observation.
    pub fn target(&self, obs: &Observation, instr: &Instruction) -> Result<GaussianMixture> {
        let targets = BranchTargets::from_percept(&perceive(obs, instr)?, &self.params);
        let (m0, s0) = self.component(targets.object);
        let (m1, s1) = self.component(targets.light);
        let lambda = self.params.lambda;
        let mut mix = GaussianMixture {
            weights: vec![],
            means: vec![],
            stds: vec![],
        };
        for (w, m, s) in [(1.0 - lambda, m0, s0), (lambda, m1, s1)] {
            if w > 0.0 {
                mix.weights.push(w);
                mix.means.push(m);
                mix.stds.push(s);
            }
        }
        Ok(mix)
    }

    /// Maps a normalized sample back to action units.
    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        vec![
            u[0] * self.params.step_max,
            u[1] * self.params.step_max,
            u[2],
        ]
    }
}

impl SamplerPolicy for MixtureDiffusionPolicy {
    fn arity(&self) -> usize {
        ACTION_DIMS
    }

    fn sample(
        &self,
        obs: &Observation,
        instr: &Instruction,
        n: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Vec<f64>>> {
        if n == 0 {
            return Err(Error::InvalidConfig(
                "sample count must be at least 1".into(),
            ));
        }
        let target = self.target(obs, instr)?;
        (0..n)
            .map(|_| {
                sample_chain(ACTION_DIMS, &self.schedule, &target, rng)
                    .map(|u| self.denormalize(&u))
            })
            .collect()
    }
}
