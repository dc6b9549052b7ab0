//! Episode driver, batch evaluation, sweeps and diagnostics.

mod batch;
mod calibrate;
mod config;
mod episode;
mod mi;
mod persist;
mod stats;
mod sweep;

pub use batch::{evaluate_batch, run_batch, summarize, BatchResult, BatchRun, Execution};
pub use calibrate::{calibrate, CalibrationReport, CalibrationSpec, Candidate};
pub use config::{
    DiffusionSpec, Method, PcdRunConfig, PolicyHandle, PolicyKind, PolicySpec, TaskConfig,
};
pub use episode::{drive, run_baseline_episode, run_pcd_episode, EpisodeRecord, StepRecord};
pub use mi::{
    action_symbol, estimate_mi, plug_in_entropy, plug_in_mi, quadrant, ActionSymbol, MIReport,
    MIN_ROLLOUTS,
};
pub use persist::{append_results, load_results, ResultLine};
pub use stats::{paired_bootstrap, PairedComparison};
pub use sweep::{
    parse_bandwidth, sweep_alpha, sweep_axis, write_sweep_csv, SweepAxis, SweepRow, ALPHA_GRID,
};
pub mod cli;
