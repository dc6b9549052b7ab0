use std::io::Write;
use std::path::Path;

use super::scene::unknown;
use super::Scene;
use crate::error::Result;
use crate::observation::{Observation, Proprio, LIGHT_PLANE, OBJECT_PLANE, TEXTURE_PLANE};
use crate::track2mask::ObjectMask;

const AMBIENT: f64 = 0.3;

fn covers(cx: f64, cy: f64, pos: [f64; 2], radius: f64) -> bool {
    (cx - pos[0]).powi(2) + (cy - pos[1]).powi(2) <= radius * radius
}

fn texture_value(pattern: u32, x: usize, y: usize) -> f64 {
    match pattern {
        0 => 0.5,
        1 => 0.35 + 0.3 * (x % 2) as f64,
        2 => 0.35 + 0.3 * ((x + y) % 2) as f64,
        p => {
            // integer hash noise in [0.3, 0.7]
            let mut h = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
                ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
                ^ (p as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
            h ^= h >> 31;
            h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
            h ^= h >> 29;
            0.3 + 0.4 * ((h >> 11) as f64 / (1u64 << 53) as f64)
        }
    }
}

/// Draw order, bottom to top: the held object, fixed markers, loose
/// objects, and the target when it rests on something.
fn draw_order(scene: &Scene) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scene.objects.len()).collect();
    order.sort_by_key(|&i| {
        let o = &scene.objects[i];
        (scene.held != Some(i), o.graspable, i == scene.target)
    });
    order
}

/// Rasterizes the scene into the three observation planes.
pub fn render(scene: &Scene) -> Observation {
    let (w, h) = scene.raster;
    let proprio = Proprio {
        gripper: scene.gripper,
        closed: scene.closed,
        holding: scene.held.is_some(),
    };
    let mut obs = Observation::blank(w, h, scene.step, proprio);
    let order = draw_order(scene);
    let light = &scene.spurious.light;
    for y in 0..h {
        for x in 0..w {
            let [cx, cy] = obs.cell_center(x, y);
            for &i in &order {
                let o = &scene.objects[i];
                if covers(cx, cy, o.pos, o.radius) {
                    obs.set(OBJECT_PLANE, x, y, o.intensity);
                }
            }
            let d2 = (cx - light.pos[0]).powi(2) + (cy - light.pos[1]).powi(2);
            let bump = light.intensity * (-d2 / (2.0 * light.spread * light.spread)).exp();
            let lum = AMBIENT + scene.spurious.brightness_offset + bump;
            obs.set(LIGHT_PLANE, x, y, lum.clamp(0.0, 1.0));
            obs.set(
                TEXTURE_PLANE,
                x,
                y,
                texture_value(scene.spurious.texture, x, y),
            );
        }
    }
    obs
}

/// Full raster footprint of every object carrying `label`, ignoring occlusion.
pub fn ground_truth_mask(scene: &Scene, label: &str) -> Result<ObjectMask> {
    if !scene.has_label(label) {
        return Err(unknown(label));
    }
    let (w, h) = scene.raster;
    let mut mask = ObjectMask::empty(w, h, label);
    for o in scene.objects.iter().filter(|o| o.label == label) {
        for y in 0..h {
            for x in 0..w {
                let cx = (x as f64 + 0.5) / w as f64;
                let cy = (y as f64 + 0.5) / h as f64;
                if covers(cx, cy, o.pos, o.radius) {
                    mask.set(x, y, true);
                }
            }
        }
    }
    Ok(mask)
}

/// Writes the observation as a binary PPM with planes mapped to RGB, each
/// cell drawn as a `scale`×`scale` block. `marker` cells are painted white.
pub fn write_ppm(
    obs: &Observation,
    scale: usize,
    marker: Option<(usize, usize)>,
    path: &Path,
) -> Result<()> {
    let scale = scale.max(1);
    let (w, h) = (obs.width() * scale, obs.height() * scale);
    let mut buf = format!("P6\n{w} {h}\n255\n").into_bytes();
    buf.reserve(w * h * 3);
    for py in 0..h {
        for px in 0..w {
            let (x, y) = (px / scale, py / scale);
            if marker == Some((x, y)) {
                buf.extend_from_slice(&[255, 255, 255]);
                continue;
            }
            for c in 0..3 {
                buf.push((obs.get(c, x, y) * 255.0).round() as u8);
            }
        }
    }
    std::fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}
