use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{PcdRunConfig, PolicyHandle};
use super::episode::drive;
use crate::action_dist::BinGrid;
use crate::error::{Error, Result};
use crate::policy::SpuriousMixtureParams;
use crate::simworld::{Scene, World};

pub const MIN_ROLLOUTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MIReport {
    /// Bits shared by the action and the light's quadrant around the target's
    /// starting position.
    pub mi_action_vs_spurious: f64,
    /// Bits shared by the action and the target's quadrant around the gripper.
    pub mi_action_vs_target: f64,
    pub samples: usize,
}

fn entropy<K: Ord>(counts: &BTreeMap<K, usize>, n: f64) -> f64 {
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Plug-in mutual information in bits between the two halves of `pairs`.
/// Constant variables give zero.
pub fn plug_in_mi<A: Ord + Clone, B: Ord + Clone>(pairs: &[(A, B)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut ab = BTreeMap::new();
    for (x, y) in pairs {
        *a.entry(x.clone()).or_insert(0usize) += 1;
        *b.entry(y.clone()).or_insert(0usize) += 1;
        *ab.entry((x.clone(), y.clone())).or_insert(0usize) += 1;
    }
    (entropy(&a, n) + entropy(&b, n) - entropy(&ab, n)).max(0.0)
}

/// Plug-in entropy in bits of a sequence of symbols.
pub fn plug_in_entropy<A: Ord + Clone>(xs: &[A]) -> f64 {
    let mut counts = BTreeMap::new();
    for x in xs {
        *counts.entry(x.clone()).or_insert(0usize) += 1;
    }
    entropy(&counts, xs.len() as f64)
}

/// Quadrant index of `p` relative to `origin`.
pub fn quadrant(p: [f64; 2], origin: [f64; 2]) -> u8 {
    (p[0] >= origin[0]) as u8 | (((p[1] >= origin[1]) as u8) << 1)
}

/// Discrete action symbol: displacement bins of the policy alphabet and the
/// gripper command class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSymbol(pub usize, pub usize, pub i8);

pub fn action_symbol(action: &[f64], grid: &BinGrid) -> ActionSymbol {
    let grip = if action[2] > 0.25 {
        1
    } else if action[2] < -0.25 {
        -1
    } else {
        0
    };
    ActionSymbol(grid.nearest(action[0]), grid.nearest(action[1]), grip)
}

/// Mutual information between the executed action and scene factors over
/// every step of `n_rollouts` uncontrasted episodes with seeds `seed + i`.
pub fn estimate_mi(
    policy: &PolicyHandle,
    world: &World,
    cfg: &PcdRunConfig,
    n_rollouts: usize,
    seed: u64,
) -> Result<MIReport> {
    if n_rollouts < MIN_ROLLOUTS {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_ROLLOUTS} rollouts, got {n_rollouts}"
        )));
    }
    let grid = SpuriousMixtureParams {
        action_bins: cfg.policy.bins,
        ..Default::default()
    }
    .displacement_grid();
    let mut spurious = Vec::new();
    let mut target = Vec::new();
    for i in 0..n_rollouts {
        let mut start: Option<[f64; 2]> = None;
        let mut observe = |scene: &Scene, action: &[f64]| {
            let a = action_symbol(action, &grid);
            let t = scene.target_object().pos;
            let t0 = *start.get_or_insert(t);
            spurious.push((a, quadrant(scene.spurious.light.pos, t0)));
            target.push((a, quadrant(t, scene.gripper)));
        };
        let record = drive(
            policy,
            world,
            cfg,
            seed.wrapping_add(i as u64),
            false,
            &mut observe,
        );
        if let Some(e) = record.error {
            log::warn!("rollout {i} ended early: {e}");
        }
    }
    Ok(MIReport {
        mi_action_vs_spurious: plug_in_mi(&spurious),
        mi_action_vs_target: plug_in_mi(&target),
        samples: spurious.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_function_of_uniform_quadrant_is_two_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs: Vec<(u8, u8)> = (0..20_000)
            .map(|_| {
                let q: u8 = rng.random_range(0..4);
                (q * 7 % 5, q)
            })
            .collect();
        assert!((plug_in_mi(&pairs) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn independent_streams_carry_little_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pairs: Vec<(u8, u8)> = (0..20_000)
            .map(|_| (rng.random_range(0..8), rng.random_range(0..4)))
            .collect();
        let mi = plug_in_mi(&pairs);
        assert!((0.0..0.01).contains(&mi), "{mi}");
    }

    #[test]
    fn constant_variable_gives_zero_and_mi_is_bounded() {
        let pairs: Vec<(u8, u8)> = (0..50).map(|i| (1, (i % 4) as u8)).collect();
        assert_eq!(plug_in_mi(&pairs), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pairs: Vec<(u8, u8)> = (0..300)
            .map(|_| (rng.random_range(0..3), rng.random_range(0..6)))
            .collect();
        let a: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        assert!(plug_in_mi(&pairs) <= plug_in_entropy(&a).min(plug_in_entropy(&b)) + 1e-12);
    }

    #[test]
    fn quadrants() {
        assert_eq!(quadrant([0.6, 0.6], [0.5, 0.5]), 3);
        assert_eq!(quadrant([0.4, 0.6], [0.5, 0.5]), 2);
        assert_eq!(quadrant([0.6, 0.4], [0.5, 0.5]), 1);
        assert_eq!(quadrant([0.4, 0.4], [0.5, 0.5]), 0);
    }

    #[test]
    fn too_few_rollouts_is_an_error() {
        let cfg = PcdRunConfig::default();
        let r = estimate_mi(
            &cfg.policy.build().unwrap(),
            &cfg.world().unwrap(),
            &cfg,
            10,
            0,
        );
        assert!(r.is_err());
    }
}
