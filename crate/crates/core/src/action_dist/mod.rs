//! Discretized action distributions and the contrastive combination rule.
//!
//! Both policy flavors meet here: autoregressive policies emit a
//! [`CategoricalDist`] per action dimension directly, while sample-emitting
//! policies go through [`kde_estimate_multi`] first. Either way the original
//! and object-masked branches end up on a shared [`BinGrid`] and are combined
//! by [`contrastive_combine`].

mod categorical;
mod contrast;
mod grid;
mod kde;
mod select;

pub use categorical::{ActionDistribution, CategoricalDist, NORMALIZATION_TOLERANCE};
pub use contrast::{contrastive_combine, contrastive_combine_multi, DecodeConfig, Selection};
pub use grid::BinGrid;
pub use kde::{
    gaussian_kernel, kde_estimate, kde_estimate_marginals, kde_estimate_multi, kde_grid,
    kernel_sum, scott_bandwidth, BandwidthRule, KdeConfig, BANDWIDTH_FLOOR,
};
pub use select::{select_action, select_index};
