use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::action_dist::{DecodeConfig, KdeConfig};
use crate::error::{Error, Result};
use crate::policy::{
    DistributionPolicy, MixtureDiffusionPolicy, SamplerPolicy, ScriptedExpert,
    SpuriousMixtureParams, SpuriousMixturePolicy,
};
use crate::simworld::{ShiftSpec, TaskKind, TaskSpec, World};
use crate::track2mask::MaskConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Per-dimension categorical outputs, decoded autoregressively.
    Autoregressive,
    /// Sample-only denoising policy, contrasted through kernel density estimates.
    #[default]
    Diffusion,
    /// Ground-truth controller; never contrasted.
    Expert,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Autoregressive => "autoregressive",
            PolicyKind::Diffusion => "diffusion",
            PolicyKind::Expert => "expert",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "autoregressive" | "ar" => Ok(PolicyKind::Autoregressive),
            "diffusion" => Ok(PolicyKind::Diffusion),
            "expert" => Ok(PolicyKind::Expert),
            other => Err(Error::InvalidConfig(format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiffusionSpec {
    pub steps: usize,
}

impl Default for DiffusionSpec {
    fn default() -> Self {
        DiffusionSpec { steps: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub lambda: f64,
    pub sharpness: f64,
    pub bins: usize,
    pub diffusion: DiffusionSpec,
}

impl Default for PolicySpec {
    fn default() -> Self {
        let p = SpuriousMixtureParams::default();
        PolicySpec {
            kind: PolicyKind::default(),
            lambda: p.lambda,
            sharpness: p.sharpness,
            bins: p.action_bins,
            diffusion: DiffusionSpec::default(),
        }
    }
}

impl PolicySpec {
    pub fn params(&self) -> SpuriousMixtureParams {
        SpuriousMixtureParams {
            lambda: self.lambda,
            sharpness: self.sharpness,
            action_bins: self.bins,
            ..SpuriousMixtureParams::default()
        }
    }

    pub fn build(&self) -> Result<PolicyHandle> {
        Ok(match self.kind {
            PolicyKind::Autoregressive => {
                PolicyHandle::Distribution(Arc::new(SpuriousMixturePolicy::new(self.params())?))
            }
            PolicyKind::Diffusion => PolicyHandle::Sampler(Arc::new(MixtureDiffusionPolicy::new(
                self.params(),
                self.diffusion.steps,
            )?)),
            PolicyKind::Expert => PolicyHandle::Expert(ScriptedExpert::default()),
        })
    }
}

/// A policy as seen by the episode driver.
#[derive(Clone)]
pub enum PolicyHandle {
    Distribution(Arc<dyn DistributionPolicy>),
    Sampler(Arc<dyn SamplerPolicy>),
    Expert(ScriptedExpert),
}

impl std::fmt::Debug for PolicyHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolicyHandle::Distribution(_) => "PolicyHandle::Distribution",
            PolicyHandle::Sampler(_) => "PolicyHandle::Sampler",
            PolicyHandle::Expert(_) => "PolicyHandle::Expert",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskConfig {
    pub kind: TaskKind,
    /// Defaults to the task's own step budget.
    pub max_steps: Option<usize>,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            kind: TaskKind::PickPlace,
            max_steps: None,
        }
    }
}

impl TaskConfig {
    pub fn spec(&self) -> TaskSpec {
        let spec = TaskSpec::new(self.kind);
        match self.max_steps {
            Some(s) => spec.with_max_steps(s),
            None => spec,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Baseline,
    #[default]
    Pcd,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::Pcd => "pcd",
        }
    }
}

/// Everything that determines a batch of episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PcdRunConfig {
    pub method: Method,
    pub policy: PolicySpec,
    pub task: TaskConfig,
    pub shift: ShiftSpec,
    pub mask: MaskConfig,
    pub decode: DecodeConfig,
    pub kde: KdeConfig,
    pub trials: usize,
    pub seed: u64,
    /// Keep stepping after success so the final-step outcome is also known.
    pub both_metrics: bool,
}

impl Default for PcdRunConfig {
    fn default() -> Self {
        PcdRunConfig {
            method: Method::Pcd,
            policy: PolicySpec::default(),
            task: TaskConfig::default(),
            shift: ShiftSpec::None,
            mask: MaskConfig::default(),
            decode: DecodeConfig::default(),
            kde: KdeConfig::default(),
            trials: 100,
            seed: 0,
            both_metrics: false,
        }
    }
}

impl PcdRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        self.policy.params().validate()?;
        if self.policy.diffusion.steps == 0 {
            return Err(Error::InvalidConfig(
                "policy.diffusion.steps must be at least 1".into(),
            ));
        }
        self.task.spec().validate()?;
        self.shift.validate()?;
        self.mask.validate()?;
        self.decode.validate()?;
        self.kde.validate()
    }

    pub fn world(&self) -> Result<World> {
        let mut world = World::new(self.task.spec(), self.shift.clone())?;
        world.terminate_on_success = !self.both_metrics;
        Ok(world)
    }

    /// Same configuration evaluated without contrast.
    pub fn baseline(&self) -> Self {
        PcdRunConfig {
            method: Method::Baseline,
            ..self.clone()
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut c = self.clone();
        c.decode.alpha = alpha;
        c
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
