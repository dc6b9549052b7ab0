//! One calibrated-benchmark episode with and without contrastive decoding,
//! printing where each run steers the gripper.

use std::path::Path;

use pcd::harness::{drive, CalibrationReport};

fn main() -> pcd::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmark/calibrated.json");
    let cfg = CalibrationReport::load(&path)?.benchmark;
    let policy = cfg.policy.build()?;
    let world = cfg.world()?;
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);

    let (scene, _) = world.reset(seed)?;
    let t = scene.target_object().pos;
    let l = scene.spurious.light.pos;
    println!(
        "seed {seed}: target at ({:.2}, {:.2}), light at ({:.2}, {:.2})",
        t[0], t[1], l[0], l[1]
    );

    for contrast in [false, true] {
        let mut path = Vec::new();
        let record = drive(&policy, &world, &cfg, seed, contrast, &mut |s, _| {
            path.push(s.gripper)
        });
        let every: Vec<String> = path
            .iter()
            .step_by(5)
            .map(|g| format!("({:.2},{:.2})", g[0], g[1]))
            .collect();
        println!(
            "{:<8} success={} steps={} ms/step={:.2}\n  gripper {}",
            if contrast { "pcd" } else { "baseline" },
            record.success_completion,
            record.total_steps,
            record.wall_ms() / record.total_steps.max(1) as f64,
            every.join(" ")
        );
    }
    Ok(())
}
