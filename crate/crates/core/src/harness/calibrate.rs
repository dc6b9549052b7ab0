use std::path::Path;

use serde::{Deserialize, Serialize};

use super::batch::{run_batch, Execution};
use super::config::{Method, PcdRunConfig, PolicyKind, TaskConfig};
use crate::error::{Error, Result};
use crate::simworld::{ShiftSpec, TaskKind};
use crate::track2mask::{InpaintStrategy, MaskConfig, PromptKind, TrackerMode};

/// Search space for the benchmark: the baseline should fail often but not
/// always under the chosen shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    pub base: PcdRunConfig,
    pub lambdas: Vec<f64>,
    pub shifts: Vec<ShiftSpec>,
    pub band: [f64; 2],
    pub coarse_trials: usize,
    pub trials: usize,
    /// First seed of the calibration episodes, kept apart from evaluation seeds.
    pub seed: u64,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        let mut base = PcdRunConfig {
            method: Method::Pcd,
            task: TaskConfig {
                kind: TaskKind::PickPlace,
                max_steps: None,
            },
            mask: MaskConfig {
                prompt: PromptKind::Detector,
                tracker: TrackerMode::Exact,
                inpaint: InpaintStrategy::BackgroundMeanFill,
                miss_prob: 0.0,
                jitter: 0,
            },
            trials: 500,
            seed: 0,
            ..PcdRunConfig::default()
        };
        base.policy.kind = PolicyKind::Diffusion;
        base.kde.n_samples = 24;
        base.decode.alpha = 1.0;
        CalibrationSpec {
            base,
            lambdas: vec![0.48, 0.5, 0.52, 0.54, 0.56, 0.58, 0.6],
            shifts: ["spatial", "brightness", "distractors", "texture"]
                .iter()
                .map(|s| ShiftSpec::parse(s).expect("known shift"))
                .collect(),
            band: [0.2, 0.5],
            coarse_trials: 100,
            trials: 500,
            seed: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub lambda: f64,
    pub shift: String,
    pub coarse_rate: f64,
    /// Baseline rate over the full calibration trial count, when measured.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// The benchmark: PCD configuration evaluated on seeds `seed..seed + trials`.
    pub benchmark: PcdRunConfig,
    pub band: [f64; 2],
    pub calibration_seed: u64,
    pub calibration_trials: usize,
    pub baseline_rate: f64,
    pub pcd_rate: f64,
    pub candidates: Vec<Candidate>,
}

impl CalibrationReport {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}

fn baseline_rate(cfg: &PcdRunConfig, trials: usize, seed: u64) -> Result<f64> {
    let c = PcdRunConfig {
        trials,
        seed,
        ..cfg.baseline()
    };
    Ok(run_batch(&c, Execution::Parallel)?.result.rate_completion)
}

/// Picks the (lambda, shift) whose baseline completion rate lies inside the
/// band and closest to its middle. Only baseline runs inform the choice.
pub fn calibrate(spec: &CalibrationSpec) -> Result<CalibrationReport> {
    let [lo, hi] = spec.band;
    let mid = 0.5 * (lo + hi);
    let mut candidates = Vec::new();
    for shift in &spec.shifts {
        for &lambda in &spec.lambdas {
            let mut cfg = spec.base.clone();
            cfg.policy.lambda = lambda;
            cfg.shift = shift.clone();
            let coarse_rate = baseline_rate(&cfg, spec.coarse_trials, spec.seed)?;
            log::info!(
                "lambda {lambda} shift {}: coarse baseline {coarse_rate:.3}",
                shift.name()
            );
            let margin = 0.1;
            let rate = if (lo - margin..=hi + margin).contains(&coarse_rate) {
                Some(baseline_rate(&cfg, spec.trials, spec.seed)?)
            } else {
                None
            };
            candidates.push((
                cfg,
                Candidate {
                    lambda,
                    shift: shift.name().to_string(),
                    coarse_rate,
                    rate,
                },
            ));
        }
    }
    let (chosen, chosen_rate) = candidates
        .iter()
        .filter_map(|(cfg, c)| c.rate.filter(|r| (lo..=hi).contains(r)).map(|r| (cfg, r)))
        .min_by(|a, b| (a.1 - mid).abs().total_cmp(&(b.1 - mid).abs()))
        .ok_or_else(|| {
            Error::InvalidConfig("no candidate has a baseline rate inside the band".into())
        })?;
    let pcd = PcdRunConfig {
        trials: spec.trials,
        seed: spec.seed,
        ..chosen.clone()
    };
    let pcd_rate = run_batch(&pcd, Execution::Parallel)?.result.rate_completion;
    Ok(CalibrationReport {
        benchmark: chosen.clone(),
        band: spec.band,
        calibration_seed: spec.seed,
        calibration_trials: spec.trials,
        baseline_rate: chosen_rate,
        pcd_rate,
        candidates: candidates.into_iter().map(|(_, c)| c).collect(),
    })
}
