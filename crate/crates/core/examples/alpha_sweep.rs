//! Sweeping the contrast strength and the inpainting strategy on a small
//! shifted batch, with results as CSV on stdout.

use pcd::harness::{sweep_axis, write_sweep_csv, PcdRunConfig, PolicyKind, SweepAxis};
use pcd::simworld::{ShiftSpec, TaskKind};

fn main() -> pcd::Result<()> {
    let mut cfg = PcdRunConfig {
        trials: 60,
        ..PcdRunConfig::default()
    };
    cfg.policy.kind = PolicyKind::Autoregressive;
    cfg.policy.lambda = 0.6;
    cfg.task.kind = TaskKind::PickPlace;
    cfg.shift = ShiftSpec::Spatial;

    let mut rows = Vec::new();
    for axis in [SweepAxis::Alpha, SweepAxis::Inpaint] {
        rows.extend(sweep_axis(&cfg, axis, &axis.default_values())?);
    }
    write_sweep_csv(&rows, std::io::stdout().lock())
}
