//! Annotating the instruction's objects, tracking them and inpainting them
//! out of the observation with each fill strategy.

use pcd::observation::OBJECT_PLANE;
use pcd::simworld::{ShiftSpec, TaskKind, TaskSpec, World};
use pcd::track2mask::{InpaintStrategy, MaskConfig, Masker};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pcd::Result<()> {
    let world = World::new(TaskSpec::new(TaskKind::PickPlace), ShiftSpec::None)?;
    let (scene, obs) = world.reset(3)?;
    let labels = &world.task.instruction.target_labels;
    println!("instruction objects: {labels:?}");

    let object_mass = |o: &pcd::observation::Observation| o.plane(OBJECT_PLANE).iter().sum::<f64>();
    println!("object-plane mass before masking: {:.2}", object_mass(&obs));

    for inpaint in [
        InpaintStrategy::ConstantFill { value: 0.0 },
        InpaintStrategy::BackgroundMeanFill,
        InpaintStrategy::NeighborDiffusionFill { iterations: 50 },
    ] {
        let cfg = MaskConfig {
            inpaint,
            ..MaskConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut masker = Masker::start(&cfg, &scene, &obs, labels, &mut rng)?;
        let (masked, cells) = masker.masked(&obs, Some(&scene))?;
        println!(
            "{:<10} {cells} cells masked, mass after {:.2}",
            inpaint.name(),
            object_mass(&masked)
        );
    }

    // follow the target for a few scripted steps
    let cfg = MaskConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut masker = Masker::start(&cfg, &scene, &obs, labels, &mut rng)?;
    let expert = pcd::policy::ScriptedExpert::default();
    let mut s = scene;
    for _ in 0..5 {
        let (next, r) = world.step(&s, &expert.act(&s, &world.task))?;
        let (_, cells) = masker.masked(&r.observation, Some(&next))?;
        println!(
            "step {}: gripper ({:.3}, {:.3}) masked cells {cells}",
            r.step, next.gripper[0], next.gripper[1]
        );
        s = next;
    }
    Ok(())
}
