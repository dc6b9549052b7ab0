use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation-time change to the scene distribution.
///
/// `None` reproduces the training layout, in which the light patch sits on
/// the target object. Every other variant decorrelates the light from the
/// target, except `Brightness` with `relocate: false`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ShiftSpec {
    #[default]
    None,
    /// Wider placement ranges and larger start-to-target distances.
    Spatial,
    Brightness {
        offset: f64,
        relocate: bool,
    },
    Distractors {
        count: usize,
        class: String,
    },
    Texture {
        pattern: u32,
    },
}

impl ShiftSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ShiftSpec::None => "none",
            ShiftSpec::Spatial => "spatial",
            ShiftSpec::Brightness { .. } => "brightness",
            ShiftSpec::Distractors { .. } => "distractors",
            ShiftSpec::Texture { .. } => "texture",
        }
    }

    /// Default parameters for each variant name.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ShiftSpec::None),
            "spatial" => Ok(ShiftSpec::Spatial),
            "brightness" => Ok(ShiftSpec::Brightness {
                offset: 0.2,
                relocate: true,
            }),
            "distractors" => Ok(ShiftSpec::Distractors {
                count: 3,
                class: "blue_cup".into(),
            }),
            "texture" => Ok(ShiftSpec::Texture { pattern: 2 }),
            other => Err(Error::InvalidConfig(format!("unknown shift {other:?}"))),
        }
    }

    pub fn all_defaults() -> Vec<ShiftSpec> {
        ["none", "spatial", "brightness", "distractors", "texture"]
            .iter()
            .map(|s| Self::parse(s).expect("known shift"))
            .collect()
    }

    /// Whether the light patch is placed independently of the target.
    pub fn decorrelates_light(&self) -> bool {
        !matches!(
            self,
            ShiftSpec::None
                | ShiftSpec::Brightness {
                    relocate: false,
                    ..
                }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ShiftSpec::Brightness { offset, .. } if !(offset.abs() <= 0.5) => Err(
                Error::InvalidConfig(format!("brightness offset {offset} outside [-0.5, 0.5]")),
            ),
            ShiftSpec::Distractors { class, .. } if super::class_intensity(class).is_none() => {
                Err(Error::UnknownLabel(class.clone()))
            }
            _ => Ok(()),
        }
    }
}
