use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::Instruction;

use super::class_intensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Reach,
    PickPlace,
    MoveNear,
    Stack,
}

impl TaskKind {
    pub const ALL: [TaskKind; 4] = [
        TaskKind::Reach,
        TaskKind::PickPlace,
        TaskKind::MoveNear,
        TaskKind::Stack,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Reach => "reach",
            TaskKind::PickPlace => "pick_place",
            TaskKind::MoveNear => "move_near",
            TaskKind::Stack => "stack",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "reach" => Ok(TaskKind::Reach),
            "pick_place" | "pickplace" => Ok(TaskKind::PickPlace),
            "move_near" | "movenear" => Ok(TaskKind::MoveNear),
            "stack" => Ok(TaskKind::Stack),
            other => Err(Error::InvalidConfig(format!("unknown task {other:?}"))),
        }
    }

    pub fn default_max_steps(&self) -> usize {
        match self {
            TaskKind::Reach => 40,
            TaskKind::PickPlace | TaskKind::MoveNear => 80,
            TaskKind::Stack => 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub instruction: Instruction,
    /// Label of the object to reach or move.
    pub target: String,
    /// Destination or reference label for multi-phase tasks.
    pub reference: Option<String>,
    /// Untouched object placed in the scene.
    pub clutter: Option<String>,
    pub success_radius: f64,
    pub max_steps: usize,
}

impl TaskSpec {
    pub fn new(kind: TaskKind) -> Self {
        let (text, target, reference, clutter, radius) = match kind {
            TaskKind::Reach => (
                "reach the red block",
                "red_block",
                None,
                Some("green_block"),
                0.05,
            ),
            TaskKind::PickPlace => (
                "put the red block in the goal zone",
                "red_block",
                Some("goal_zone"),
                None,
                0.05,
            ),
            TaskKind::MoveNear => (
                "move the red block near the green block",
                "red_block",
                Some("green_block"),
                None,
                0.1,
            ),
            TaskKind::Stack => (
                "stack the green block on the yellow block",
                "green_block",
                Some("yellow_block"),
                None,
                0.04,
            ),
        };
        let mut labels = vec![target.to_string()];
        labels.extend(reference.map(str::to_string));
        Self {
            kind,
            instruction: Instruction {
                text: text.into(),
                target_labels: labels,
            },
            target: target.into(),
            reference: reference.map(str::to_string),
            clutter: clutter.map(str::to_string),
            success_radius: radius,
            max_steps: kind.default_max_steps(),
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig(
                "task.max_steps must be at least 1".into(),
            ));
        }
        if !(self.success_radius > 0.0) {
            return Err(Error::InvalidConfig(
                "task.success_radius must be positive".into(),
            ));
        }
        self.instruction.validate()?;
        for label in std::iter::once(&self.target)
            .chain(&self.reference)
            .chain(&self.clutter)
        {
            if class_intensity(label).is_none() {
                return Err(Error::UnknownLabel(label.clone()));
            }
        }
        Ok(())
    }
}
