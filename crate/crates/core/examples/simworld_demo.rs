//! Rolling out the scripted expert in every task under every shift and
//! writing the frames of one episode as PPM images.

use pcd::policy::ScriptedExpert;
use pcd::simworld::{write_ppm, ShiftSpec, TaskKind, TaskSpec, World};

fn main() -> pcd::Result<()> {
    let expert = ScriptedExpert::default();
    for kind in TaskKind::ALL {
        for shift in ShiftSpec::all_defaults() {
            let world = World::new(TaskSpec::new(kind), shift.clone())?;
            let (mut scene, _) = world.reset(0)?;
            let mut steps = 0;
            while !scene.terminated {
                let (next, r) = world.step(&scene, &expert.act(&scene, &world.task))?;
                steps = r.step;
                scene = next;
            }
            println!(
                "{:<10} {:<12} success={} after {steps} steps",
                kind.name(),
                shift.name(),
                world.success(&scene)
            );
        }
    }

    let dir = std::env::temp_dir().join("pcd_simworld_demo");
    std::fs::create_dir_all(&dir)?;
    let world = World::new(
        TaskSpec::new(TaskKind::Stack),
        ShiftSpec::parse("brightness")?,
    )?;
    let (mut scene, obs) = world.reset(1)?;
    write_ppm(&obs, 4, None, &dir.join("step_0000.ppm"))?;
    while !scene.terminated {
        let (next, r) = world.step(&scene, &expert.act(&scene, &world.task))?;
        let marker = r.observation.cell_of(next.gripper);
        write_ppm(
            &r.observation,
            4,
            Some(marker),
            &dir.join(format!("step_{:04}.ppm", r.step)),
        )?;
        scene = next;
    }
    println!("frames written to {}", dir.display());
    Ok(())
}
