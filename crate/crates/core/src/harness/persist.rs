use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::batch::BatchResult;
use super::config::PcdRunConfig;
use crate::error::{Error, Result};

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultLine {
    pub config_hash: String,
    pub task: String,
    pub shift: String,
    pub method: String,
    pub alpha: f64,
    pub n: usize,
    pub trials: usize,
    pub rate_completion: f64,
    pub rate_maxstep: f64,
    pub mean_ms: f64,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ResultLine {
    pub fn new(cfg: &PcdRunConfig, result: &BatchResult) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ResultLine {
            config_hash: result.config_hash.clone(),
            task: cfg.task.kind.name().to_string(),
            shift: cfg.shift.name().to_string(),
            method: cfg.method.name().to_string(),
            alpha: cfg.decode.alpha,
            n: cfg.kde.n_samples,
            trials: result.n_trials,
            rate_completion: result.rate_completion,
            rate_maxstep: result.rate_maxstep,
            mean_ms: result.mean_ms,
            seed: cfg.seed,
            timestamp,
        }
    }

    pub fn batch(&self) -> BatchResult {
        BatchResult {
            config_hash: self.config_hash.clone(),
            n_trials: self.trials,
            rate_completion: self.rate_completion,
            rate_maxstep: self.rate_maxstep,
            mean_ms: self.mean_ms,
        }
    }
}

/// Appends one JSON object per line.
pub fn append_results(path: &Path, lines: &[ResultLine]) -> Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    for line in lines {
        let json = serde_json::to_string(line).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(file, "{json}")?;
    }
    Ok(())
}

/// Reads a results file; blank lines are skipped and a malformed line is
/// reported with its 1-based number.
pub fn load_results(path: &Path) -> Result<Vec<ResultLine>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(parsed);
    }
    Ok(out)
}
