use serde::{Deserialize, Serialize};

use super::{ActionDistribution, CategoricalDist};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Bin center of maximal probability, lowest index on ties.
    #[default]
    Greedy,
    /// Categorical draw per dimension.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeConfig {
    /// Contrast strength; zero leaves the policy untouched.
    pub alpha: f64,
    /// Lower bound for masked-branch probabilities in the ratio.
    pub prob_floor: f64,
    pub selection: Selection,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            prob_floor: 1e-8,
            selection: Selection::Greedy,
        }
    }
}

impl DecodeConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::NegativeAlpha(self.alpha));
        }
        if !(self.prob_floor > 0.0 && self.prob_floor <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "decode.prob_floor must lie in (0, 1e-3], got {}",
                self.prob_floor
            )));
        }
        Ok(())
    }
}

/// Reweights `p` by `(p / max(p_masked, floor))^alpha` and renormalizes.
///
/// Bins with zero original probability stay at zero. With `alpha == 0` the
/// input is returned unchanged.
pub fn contrastive_combine(
    p: &CategoricalDist,
    p_masked: &CategoricalDist,
    cfg: &DecodeConfig,
) -> Result<CategoricalDist> {
    cfg.validate()?;
    if p.grid() != p_masked.grid() {
        return Err(Error::GridMismatch);
    }
    if cfg.alpha == 0.0 {
        return Ok(p.clone());
    }
    let floor_ln = cfg.prob_floor.ln();
    let log_w: Vec<f64> = p
        .probs()
        .iter()
        .zip(p_masked.probs())
        .map(|(&pk, &qk)| {
            if pk == 0.0 {
                f64::NEG_INFINITY
            } else {
                let ln_p = pk.ln();
                let ln_q = if qk > cfg.prob_floor {
                    qk.ln()
                } else {
                    floor_ln
                };
                ln_p + cfg.alpha * (ln_p - ln_q)
            }
        })
        .collect();
    CategoricalDist::from_log_weights(*p.grid(), &log_w)
}

/// Dimension-wise [`contrastive_combine`].
pub fn contrastive_combine_multi(
    p: &ActionDistribution,
    p_masked: &ActionDistribution,
    cfg: &DecodeConfig,
) -> Result<ActionDistribution> {
    if p.arity() != p_masked.arity() {
        return Err(Error::DimensionMismatch {
            left: p.arity(),
            right: p_masked.arity(),
        });
    }
    let dims = p
        .dims()
        .iter()
        .zip(p_masked.dims())
        .map(|(a, b)| contrastive_combine(a, b, cfg))
        .collect::<Result<Vec<_>>>()?;
    ActionDistribution::new(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_dist::BinGrid;

    fn dist(p: &[f64]) -> CategoricalDist {
        CategoricalDist::new(BinGrid::new(0.0, 1.0, p.len()).unwrap(), p.to_vec()).unwrap()
    }

    #[test]
    fn worked_three_bin_example() {
        // unnormalized: 0.5*0.5/0.6, 0.3*0.3/0.3, 0.2*0.2/0.1
        let out = contrastive_combine(
            &dist(&[0.5, 0.3, 0.2]),
            &dist(&[0.6, 0.3, 0.1]),
            &DecodeConfig::with_alpha(1.0),
        )
        .unwrap();
        let expected = [0.37313, 0.26866, 0.35821];
        for (a, b) in out.probs().iter().zip(expected) {
            assert!((a - b).abs() < 5e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn identical_inputs_are_a_fixed_point() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let out = contrastive_combine(&p, &p, &DecodeConfig::with_alpha(0.7)).unwrap();
        for (a, b) in out.probs().iter().zip(p.probs()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_alpha_returns_input() {
        let p = dist(&[0.1, 0.2, 0.7]);
        let q = dist(&[0.9, 0.05, 0.05]);
        assert_eq!(
            contrastive_combine(&p, &q, &DecodeConfig::with_alpha(0.0)).unwrap(),
            p
        );
    }

    #[test]
    fn rejects_mismatch_and_negative_alpha() {
        let p = dist(&[0.5, 0.5]);
        let q = CategoricalDist::new(BinGrid::new(0.0, 2.0, 2).unwrap(), vec![0.5, 0.5]).unwrap();
        assert_eq!(
            contrastive_combine(&p, &q, &DecodeConfig::default()),
            Err(Error::GridMismatch)
        );
        assert_eq!(
            contrastive_combine(&p, &p, &DecodeConfig::with_alpha(-0.1)),
            Err(Error::NegativeAlpha(-0.1))
        );
        let a = ActionDistribution::new(vec![p.clone()]).unwrap();
        let b = ActionDistribution::new(vec![p.clone(), p]).unwrap();
        assert!(matches!(
            contrastive_combine_multi(&a, &b, &DecodeConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn floor_prevents_division_blowup() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[1.0, 0.0]);
        let out = contrastive_combine(&p, &q, &DecodeConfig::with_alpha(1.0)).unwrap();
        assert!(out.probs().iter().all(|x| x.is_finite()));
        assert!(out.probs()[1] > 0.999);
    }

    #[test]
    fn prob_floor_range() {
        let cfg = DecodeConfig {
            prob_floor: 0.01,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = DecodeConfig {
            prob_floor: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
