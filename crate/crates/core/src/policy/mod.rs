//! Black-box policy interfaces and the synthetic policies used to exercise
//! them.
//!
//! [`SpuriousMixturePolicy`] and [`MixtureDiffusionPolicy`] both blend an
//! object-driven behavior with a light-driven one, weighted by `lambda`.
//! The first exposes per-dimension categorical distributions in
//! autoregressive order; the second only returns samples, drawn by
//! iterative denoising against an analytic noise predictor.

mod diffusion;
mod expert;
mod mixture;
mod perception;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::action_dist::{BinGrid, CategoricalDist};
use crate::error::{Error, Result};
use crate::observation::Observation;

pub use diffusion::{
    denoise_step, sample_chain, DiffusionSchedule, GaussianMixture, MixtureDiffusionPolicy,
    NoisePredictor, NoiseVariance,
};
pub use expert::ScriptedExpert;
pub use mixture::{BranchTargets, Desire, SpuriousMixtureParams, SpuriousMixturePolicy};
pub use perception::{locate_class, locate_light, perceive, LightCue, Percept};

/// Number of action dimensions emitted by the synthetic policies: `[dx, dy, grip]`.
pub const ACTION_DIMS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub text: String,
    /// Objects the instruction refers to, manipulated object first.
    pub target_labels: Vec<String>,
}

impl Instruction {
    pub fn validate(&self) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(Error::InvalidConfig("instruction text is empty".into()));
        }
        if self.target_labels.is_empty() {
            return Err(Error::InvalidConfig(
                "instruction names no target object".into(),
            ));
        }
        Ok(())
    }
}

/// Bin indices already decoded for earlier action dimensions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixContext {
    pub committed: Vec<usize>,
}

impl PrefixContext {
    pub fn len(&self) -> usize {
        self.committed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.committed.is_empty()
    }
}

/// Policy that exposes the distribution of each action dimension given the
/// dimensions decoded so far.
pub trait DistributionPolicy: Send + Sync {
    fn arity(&self) -> usize;

    /// Bin alphabet of dimension `t`.
    fn alphabet(&self, t: usize) -> BinGrid;

    /// Distribution of dimension `prefix.len()`.
    fn predict(
        &self,
        obs: &Observation,
        instr: &Instruction,
        prefix: &PrefixContext,
    ) -> Result<CategoricalDist>;
}

/// Policy that only produces action samples.
pub trait SamplerPolicy: Send + Sync {
    fn arity(&self) -> usize;

    /// `n` rows of `arity()` values.
    fn sample(
        &self,
        obs: &Observation,
        instr: &Instruction,
        n: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Vec<f64>>>;
}
