use std::io::Write;

use serde::{Deserialize, Serialize};

use super::batch::{run_batch, BatchRun, Execution};
use super::config::PcdRunConfig;
use crate::action_dist::BandwidthRule;
use crate::error::{Error, Result};
use crate::simworld::ShiftSpec;
use crate::track2mask::{InpaintStrategy, PromptKind};

/// Alpha grid of the ablation.
pub const ALPHA_GRID: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Alpha,
    Annotation,
    Inpaint,
    Bandwidth,
    N,
    Shift,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Annotation => "annotation",
            SweepAxis::Inpaint => "inpaint",
            SweepAxis::Bandwidth => "bandwidth",
            SweepAxis::N => "n",
            SweepAxis::Shift => "shift",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "alpha" => SweepAxis::Alpha,
            "annotation" => SweepAxis::Annotation,
            "inpaint" => SweepAxis::Inpaint,
            "bandwidth" => SweepAxis::Bandwidth,
            "n" => SweepAxis::N,
            "shift" => SweepAxis::Shift,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sweep axis {other:?}"
                )))
            }
        })
    }

    pub fn default_values(self) -> Vec<String> {
        let v: &[&str] = match self {
            SweepAxis::Alpha => &["0", "0.2", "0.4", "0.6", "0.8", "1"],
            SweepAxis::Annotation => &["exact", "miss=0.2", "jitter=2"],
            SweepAxis::Inpaint => &["constant", "mean", "diffusion"],
            SweepAxis::Bandwidth => &["scott", "0.002", "0.01", "0.05"],
            SweepAxis::N => &["4", "8", "24"],
            SweepAxis::Shift => &["none", "spatial", "brightness", "distractors", "texture"],
        };
        v.iter().map(|s| s.to_string()).collect()
    }

    /// `cfg` with this axis set to `value`.
    ///
    /// Annotation values: `exact`, `point`, `box`, `nearest`, `miss=<p>`,
    /// `jitter=<cells>`. Bandwidth values: `scott` or a fixed width.
    pub fn apply(self, cfg: &PcdRunConfig, value: &str) -> Result<PcdRunConfig> {
        let bad = || Error::InvalidConfig(format!("invalid {} value {value:?}", self.name()));
        let mut c = cfg.clone();
        match self {
            SweepAxis::Alpha => c.decode.alpha = value.parse().map_err(|_| bad())?,
            SweepAxis::Inpaint => c.mask.inpaint = InpaintStrategy::parse(value)?,
            SweepAxis::Bandwidth => c.kde.bandwidth = parse_bandwidth(value)?,
            SweepAxis::N => c.kde.n_samples = value.parse().map_err(|_| bad())?,
            SweepAxis::Shift => c.shift = ShiftSpec::parse(value)?,
            SweepAxis::Annotation => {
                c.mask.prompt = PromptKind::Detector;
                c.mask.miss_prob = 0.0;
                c.mask.jitter = 0;
                match value.split_once('=') {
                    Some(("miss", p)) => c.mask.miss_prob = p.parse().map_err(|_| bad())?,
                    Some(("jitter", j)) => c.mask.jitter = j.parse().map_err(|_| bad())?,
                    None if value == "exact" => {}
                    None if value == "nearest" => {
                        c.mask.tracker = crate::track2mask::TrackerMode::NearestMatch
                    }
                    None => c.mask.prompt = PromptKind::parse(value)?,
                    _ => return Err(bad()),
                }
            }
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn parse_bandwidth(s: &str) -> Result<BandwidthRule> {
    match s {
        "scott" => Ok(BandwidthRule::Scott),
        v => match v.parse::<f64>() {
            Ok(b) if b > 0.0 && b.is_finite() => Ok(BandwidthRule::Fixed(b)),
            _ => Err(Error::InvalidBandwidth(v.parse().unwrap_or(f64::NAN))),
        },
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: String,
    pub config: PcdRunConfig,
    pub run: BatchRun,
}

/// One batch per alpha, all on the seeds of `cfg`.
pub fn sweep_alpha(cfg: &PcdRunConfig, alphas: &[f64]) -> Result<Vec<(f64, BatchRun)>> {
    alphas
        .iter()
        .map(|&a| Ok((a, run_batch(&cfg.with_alpha(a), Execution::Parallel)?)))
        .collect()
}

/// One batch per value of a single axis, all on the seeds of `cfg`.
pub fn sweep_axis(cfg: &PcdRunConfig, axis: SweepAxis, values: &[String]) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|v| {
            let config = axis.apply(cfg, v)?;
            let run = run_batch(&config, Execution::Parallel)?;
            Ok(SweepRow {
                axis,
                value: v.clone(),
                config,
                run,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    axis: &'a str,
    value: &'a str,
    method: &'a str,
    alpha: f64,
    n: usize,
    trials: usize,
    rate_completion: f64,
    rate_maxstep: f64,
    mean_ms: f64,
    config_hash: &'a str,
}

/// Plot-ready CSV, one row per swept value.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        let res = &r.run.result;
        w.serialize(CsvRow {
            axis: r.axis.name(),
            value: &r.value,
            method: r.config.method.name(),
            alpha: r.config.decode.alpha,
            n: r.config.kde.n_samples,
            trials: res.n_trials,
            rate_completion: res.rate_completion,
            rate_maxstep: res.rate_maxstep,
            mean_ms: res.mean_ms,
            config_hash: &res.config_hash,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
