//! Policy contrastive decoding (PCD) for black-box robot policies.
//!
//! A policy is queried twice per step: once on the raw observation and once
//! on an object-masked copy produced by [`track2mask`]. The two action
//! distributions are combined by [`action_dist::contrastive_combine`], which
//! boosts actions that depend on the target objects and suppresses actions
//! the policy would take anyway from background cues such as lighting.
//!
//! The crate also ships a small planar manipulation world ([`simworld`]) in
//! which a controllable spurious cue is correlated with the target during
//! "training" layouts and decorrelated under distribution shift, plus the
//! evaluation harness in [`harness`].

pub mod action_dist;
pub mod error;
pub mod harness;
pub mod observation;
pub mod policy;
pub mod simworld;
pub mod track2mask;

pub use error::{Error, Result};
pub use observation::{Observation, Proprio};
