use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Method, PcdRunConfig, PolicyHandle};
use super::episode::{run_baseline_episode, run_pcd_episode, EpisodeRecord};
use crate::error::Result;
use crate::simworld::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub config_hash: String,
    pub n_trials: usize,
    pub rate_completion: f64,
    pub rate_maxstep: f64,
    /// Mean wall-clock per episode.
    pub mean_ms: f64,
}

impl BatchResult {
    /// Equality ignoring wall-clock time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.config_hash == other.config_hash
            && self.n_trials == other.n_trials
            && self.rate_completion == other.rate_completion
            && self.rate_maxstep == other.rate_maxstep
    }
}

/// A batch result together with the episode records it summarizes,
/// ordered by trial index.
#[derive(Debug, Clone)]
pub struct BatchRun {
    pub result: BatchResult,
    pub records: Vec<EpisodeRecord>,
}

impl BatchRun {
    pub fn completions(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.success_completion).collect()
    }
}

pub fn evaluate_batch(cfg: &PcdRunConfig) -> Result<BatchResult> {
    Ok(run_batch(cfg, Execution::default())?.result)
}

/// Runs trials with seeds `cfg.seed + i`.
pub fn run_batch(cfg: &PcdRunConfig, execution: Execution) -> Result<BatchRun> {
    cfg.validate()?;
    let policy = cfg.policy.build()?;
    let world = cfg.world()?;
    let run = |i: usize| trial(&policy, &world, cfg, cfg.seed.wrapping_add(i as u64));
    let records: Vec<EpisodeRecord> = match execution {
        Execution::Serial => (0..cfg.trials).map(run).collect(),
        Execution::Parallel => (0..cfg.trials).into_par_iter().map(run).collect(),
    };
    Ok(BatchRun {
        result: summarize(cfg, &records),
        records,
    })
}

fn trial(policy: &PolicyHandle, world: &World, cfg: &PcdRunConfig, seed: u64) -> EpisodeRecord {
    match cfg.method {
        Method::Baseline => run_baseline_episode(policy, world, cfg, seed),
        Method::Pcd => run_pcd_episode(policy, world, cfg, seed),
    }
}

pub fn summarize(cfg: &PcdRunConfig, records: &[EpisodeRecord]) -> BatchResult {
    let n = records.len();
    let count = |f: fn(&EpisodeRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64;
    BatchResult {
        config_hash: cfg.hash(),
        n_trials: n,
        rate_completion: count(|r| r.success_completion) / n as f64,
        rate_maxstep: count(|r| r.success_maxstep) / n as f64,
        mean_ms: records.iter().map(EpisodeRecord::wall_ms).sum::<f64>() / n as f64,
    }
}
