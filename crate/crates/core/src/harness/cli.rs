use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::batch::{run_batch, Execution};
use super::calibrate::{calibrate, CalibrationReport, CalibrationSpec};
use super::config::{Method, PcdRunConfig, PolicyKind};
use super::episode::{drive, mask_stream};
use super::mi::estimate_mi;
use super::persist::{append_results, ResultLine};
use super::stats::paired_bootstrap;
use super::sweep::{parse_bandwidth, sweep_axis, write_sweep_csv, SweepAxis};
use crate::error::{Error, Result};
use crate::simworld::{write_ppm, ShiftSpec, TaskKind};
use crate::track2mask::{InpaintStrategy, Masker, PromptKind};

#[derive(Debug, Parser)]
#[command(
    name = "pcd",
    version,
    about = "Contrastive decoding of policies against object-masked observations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one batch.
    Run {
        #[command(flatten)]
        common: Common,
        /// Evaluate the baseline too and compare with a paired bootstrap.
        #[arg(long)]
        compare: bool,
    },
    /// Evaluate one batch per value of a single axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["alpha", "annotation", "inpaint", "bandwidth", "n", "shift"])]
        axis: String,
        /// Comma-separated axis values; defaults depend on the axis.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
        /// CSV output, one row per value.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Mutual information between actions and scene factors.
    Mi {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3000)]
        rollouts: usize,
    },
    /// Run one episode and write every frame as a PPM image.
    Demo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        frames_dir: PathBuf,
        #[arg(long, default_value_t = 8)]
        scale: usize,
    },
    /// Choose the benchmark's spurious reliance and shift.
    Calibrate {
        #[arg(long, default_value = "crates/core/benchmark/calibrated.json")]
        out: PathBuf,
    },
}

/// Flags shared by the evaluation commands; each overrides the config file.
#[derive(Debug, Args, Default)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// `scott` or a fixed bandwidth.
    #[arg(long)]
    pub bandwidth: Option<String>,
    #[arg(long, value_parser = ["point", "box", "detector"])]
    pub prompt: Option<String>,
    #[arg(long, value_parser = ["constant", "mean", "diffusion"])]
    pub inpaint: Option<String>,
    #[arg(long, value_parser = ["reach", "pick_place", "move_near", "stack"])]
    pub task: Option<String>,
    #[arg(long, value_parser = ["none", "spatial", "brightness", "distractors", "texture"])]
    pub shift: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = ["autoregressive", "diffusion", "expert"])]
    pub policy: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_parser = ["baseline", "pcd"])]
    pub method: Option<String>,
    /// Append result lines to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub both_metrics: bool,
}

impl Common {
    pub fn config(&self) -> Result<PcdRunConfig> {
        let mut c = match &self.config {
            Some(p) => load_run_config(p)?,
            None => PcdRunConfig::default(),
        };
        if let Some(a) = self.alpha {
            c.decode.alpha = a;
        }
        if let Some(n) = self.n_samples {
            c.kde.n_samples = n;
        }
        if let Some(b) = &self.bandwidth {
            c.kde.bandwidth = parse_bandwidth(b)?;
        }
        if let Some(p) = &self.prompt {
            c.mask.prompt = PromptKind::parse(p)?;
        }
        if let Some(s) = &self.inpaint {
            c.mask.inpaint = InpaintStrategy::parse(s)?;
        }
        if let Some(t) = &self.task {
            c.task.kind = TaskKind::parse(t)?;
        }
        if let Some(s) = &self.shift {
            c.shift = ShiftSpec::parse(s)?;
        }
        if let Some(t) = self.trials {
            c.trials = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(p) = &self.policy {
            c.policy.kind = PolicyKind::parse(p)?;
        }
        if let Some(l) = self.lambda {
            c.policy.lambda = l;
        }
        if let Some(m) = &self.method {
            c.method = if m == "baseline" {
                Method::Baseline
            } else {
                Method::Pcd
            };
        }
        c.both_metrics |= self.both_metrics;
        c.validate()?;
        Ok(c)
    }
}

/// A run config, or the benchmark config inside a calibration report.
fn load_run_config(path: &Path) -> Result<PcdRunConfig> {
    match CalibrationReport::load(path) {
        Ok(report) => Ok(report.benchmark),
        Err(_) => PcdRunConfig::load(path),
    }
}

fn record(out: Option<&Path>, lines: &[ResultLine]) -> Result<()> {
    match out {
        Some(p) => append_results(p, lines),
        None => Ok(()),
    }
}

fn summary_line(cfg: &PcdRunConfig, line: &ResultLine) -> String {
    format!(
        "{:<8} task={} shift={} alpha={} n={} trials={} completion={:.3} maxstep={:.3} mean_ms={:.2}",
        cfg.method.name(),
        line.task,
        line.shift,
        line.alpha,
        line.n,
        line.trials,
        line.rate_completion,
        line.rate_maxstep,
        line.mean_ms
    )
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run { common, compare } => {
            let cfg = common.config()?;
            let run = run_batch(&cfg, Execution::Parallel)?;
            let line = ResultLine::new(&cfg, &run.result);
            writeln!(stdout, "{}", summary_line(&cfg, &line))?;
            let mut lines = vec![line];
            if compare && cfg.method == Method::Pcd {
                let base_cfg = cfg.baseline();
                let base = run_batch(&base_cfg, Execution::Parallel)?;
                let base_line = ResultLine::new(&base_cfg, &base.result);
                writeln!(stdout, "{}", summary_line(&base_cfg, &base_line))?;
                let cmp =
                    paired_bootstrap(&base.completions(), &run.completions(), 10_000, cfg.seed)?;
                writeln!(
                    stdout,
                    "difference={:+.3} one-sided p={:.4}",
                    cmp.difference, cmp.p_value
                )?;
                lines.push(base_line);
            }
            record(common.out.as_deref(), &lines)
        }
        Command::Sweep {
            common,
            axis,
            values,
            csv,
        } => {
            let cfg = common.config()?;
            let axis = SweepAxis::parse(&axis)?;
            let values = values.unwrap_or_else(|| axis.default_values());
            let rows = sweep_axis(&cfg, axis, &values)?;
            let mut lines = Vec::new();
            for r in &rows {
                let line = ResultLine::new(&r.config, &r.run.result);
                writeln!(
                    stdout,
                    "{}={:<12} {}",
                    axis.name(),
                    r.value,
                    summary_line(&r.config, &line)
                )?;
                lines.push(line);
            }
            if let Some(p) = csv {
                write_sweep_csv(&rows, std::fs::File::create(p)?)?;
            }
            record(common.out.as_deref(), &lines)
        }
        Command::Mi { common, rollouts } => {
            let cfg = common.config()?;
            let report = estimate_mi(
                &cfg.policy.build()?,
                &cfg.world()?,
                &cfg,
                rollouts,
                cfg.seed,
            )?;
            writeln!(
                stdout,
                "I(action; light quadrant) = {:.4} bits\nI(action; target quadrant) = {:.4} bits\nsamples = {}",
                report.mi_action_vs_spurious, report.mi_action_vs_target, report.samples
            )?;
            Ok(())
        }
        Command::Demo {
            common,
            frames_dir,
            scale,
        } => demo(&common.config()?, &frames_dir, scale, stdout),
        Command::Calibrate { out } => {
            let report = calibrate(&CalibrationSpec::default())?;
            for c in &report.candidates {
                let full = c
                    .rate
                    .map(|r| format!("{r:.3}"))
                    .unwrap_or_else(|| "-".into());
                writeln!(
                    stdout,
                    "lambda={:.2} shift={:<12} coarse={:.3} full={full}",
                    c.lambda, c.shift, c.coarse_rate
                )?;
            }
            writeln!(
                stdout,
                "chosen lambda={} shift={} baseline={:.3} pcd={:.3}",
                report.benchmark.policy.lambda,
                report.benchmark.shift.name(),
                report.baseline_rate,
                report.pcd_rate
            )?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            report.save(&out)
        }
    }
}

fn demo(cfg: &PcdRunConfig, dir: &Path, scale: usize, stdout: &mut dyn Write) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let policy = cfg.policy.build()?;
    let world = cfg.world()?;
    let (scene0, obs0) = world.reset(cfg.seed)?;
    // Replays the episode's annotation to draw the masked frames.
    let mut rng = mask_stream(cfg.seed);
    let mut masker = Masker::start(
        &cfg.mask,
        &scene0,
        &obs0,
        &world.task.instruction.target_labels,
        &mut rng,
    )?;
    let mut summary = Vec::new();
    let mut frame = 0usize;
    let mut failure: Option<Error> = None;
    let contrast = cfg.method == Method::Pcd;
    let rec = drive(
        &policy,
        &world,
        cfg,
        cfg.seed,
        contrast,
        &mut |scene, action| {
            let obs = crate::simworld::render(scene);
            let gripper = obs.cell_of(scene.gripper);
            let written = write_ppm(
                &obs,
                scale,
                Some(gripper),
                &dir.join(format!("step_{frame:04}.ppm")),
            )
            .and_then(|_| masker.masked(&obs, Some(scene)))
            .and_then(|(m, cells)| {
                write_ppm(
                    &m,
                    scale,
                    Some(gripper),
                    &dir.join(format!("masked_{frame:04}.ppm")),
                )?;
                Ok(cells)
            });
            match written {
            Ok(cells) => summary.push(format!(
                "step {frame:04} gripper=({:.3}, {:.3}) {} action=[{:+.4}, {:+.4}, {:+.2}] masked_cells={cells}",
                scene.gripper[0],
                scene.gripper[1],
                if scene.held.is_some() { "holding" } else { "empty  " },
                action[0],
                action[1],
                action[2]
            )),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
            frame += 1;
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    summary.push(format!(
        "seed {} steps {} success_completion {} success_maxstep {}{}",
        rec.seed,
        rec.total_steps,
        rec.success_completion,
        rec.success_maxstep,
        rec.error.map(|e| format!(" error {e}")).unwrap_or_default()
    ));
    let text = summary.join("\n") + "\n";
    std::fs::write(dir.join("summary.txt"), &text)?;
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pcd").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"trials": 7, "policy": {"lambda": 0.3}, "decode": {"alpha": 0.5}}"#,
        )
        .unwrap();
        let cli = parse(&[
            "run",
            "--config",
            path.to_str().unwrap(),
            "--alpha",
            "0.8",
            "--bandwidth",
            "0.01",
        ]);
        let Command::Run { common, .. } = cli.command else {
            panic!()
        };
        let c = common.config().unwrap();
        assert_eq!((c.trials, c.policy.lambda, c.decode.alpha), (7, 0.3, 0.8));
        assert_eq!(
            c.kde.bandwidth,
            crate::action_dist::BandwidthRule::Fixed(0.01)
        );
    }

    #[test]
    fn run_writes_result_lines() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.jsonl");
        let cli = parse(&[
            "run",
            "--policy",
            "autoregressive",
            "--task",
            "reach",
            "--trials",
            "3",
            "--compare",
            "--out",
            out.to_str().unwrap(),
        ]);
        let mut buf = Vec::new();
        run(cli, &mut buf).unwrap();
        let lines = super::super::persist::load_results(&out).unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].method, "baseline");
        assert!(String::from_utf8(buf).unwrap().contains("p="));
    }

    #[test]
    fn demo_writes_frames() {
        let dir = tempfile::tempdir().unwrap();
        let cli = parse(&[
            "demo",
            "--policy",
            "autoregressive",
            "--task",
            "reach",
            "--frames-dir",
            dir.path().to_str().unwrap(),
        ]);
        let mut buf = Vec::new();
        run(cli, &mut buf).unwrap();
        assert!(dir.path().join("step_0000.ppm").exists());
        assert!(dir.path().join("masked_0000.ppm").exists());
        let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary
            .lines()
            .last()
            .unwrap()
            .contains("success_completion true"));
    }

    #[test]
    fn rejects_unknown_values() {
        assert!(Cli::try_parse_from(["pcd", "run", "--inpaint", "lama"]).is_err());
        assert!(Cli::try_parse_from(["pcd", "sweep", "--axis", "depth"]).is_err());
    }
}
