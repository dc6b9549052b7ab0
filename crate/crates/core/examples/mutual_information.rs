//! How much the chosen action reveals about the light's position versus the
//! target's, for policies with increasing reliance on the light.

use pcd::harness::{estimate_mi, PcdRunConfig, PolicyKind};
use pcd::simworld::TaskKind;

fn main() -> pcd::Result<()> {
    let rollouts = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3000);
    println!("{rollouts} rollouts, pick_place, training layout");
    for (kind, lambda) in [
        (PolicyKind::Expert, 0.0),
        (PolicyKind::Autoregressive, 0.0),
        (PolicyKind::Autoregressive, 0.3),
        (PolicyKind::Autoregressive, 0.6),
        (PolicyKind::Autoregressive, 0.9),
    ] {
        let mut cfg = PcdRunConfig::default().baseline();
        cfg.policy.kind = kind;
        cfg.policy.lambda = lambda;
        cfg.task.kind = TaskKind::PickPlace;
        let mi = estimate_mi(&cfg.policy.build()?, &cfg.world()?, &cfg, rollouts, 0)?;
        println!(
            "{:<15} lambda={lambda:.1}  I(a; light)={:.4} bits  I(a; target)={:.4} bits",
            kind.name(),
            mi.mi_action_vs_spurious,
            mi.mi_action_vs_target
        );
    }
    Ok(())
}
