use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::templates::*;
use crate::lm::LmRole;
use crate::trajectory::Trajectory;

/// Cap on relabeled goals per trajectory.
pub const MAX_RELABELS: usize = 10;
/// Cap on instructions listed in a goal-generation prompt.
pub const MAX_INSTRUCTIONS: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("cannot relabel an empty trajectory")]
    TrajectoryEmpty,
    #[error("the goal list is empty")]
    NoGoals,
    #[error("{0} instructions given, at most {MAX_INSTRUCTIONS} allowed")]
    TooManyInstructions(usize),
    #[error("the instruction list is empty")]
    NoInstructions,
    #[error("variant does not exist: {0}")]
    InvalidVariant(&'static str),
}

/// Which template to use for a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PromptVariant {
    pub role: LmRole,
    pub cot: bool,
    pub human_tips: bool,
}

impl PromptVariant {
    pub fn new(role: LmRole, cot: bool, human_tips: bool) -> Result<Self, PromptError> {
        if human_tips && !cot {
            return Err(PromptError::InvalidVariant("human tips require chain of thought"));
        }
        if human_tips && role != LmRole::Relabel {
            return Err(PromptError::InvalidVariant("only the relabeler has human tips"));
        }
        Ok(PromptVariant { role, cot, human_tips })
    }

    /// Every valid (role, variant) combination.
    pub fn all() -> [PromptVariant; 7] {
        let v = |role, cot, human_tips| PromptVariant { role, cot, human_tips };
        [
            v(LmRole::Relabel, false, false),
            v(LmRole::Relabel, true, false),
            v(LmRole::Relabel, true, true),
            v(LmRole::Reward, false, false),
            v(LmRole::Reward, true, false),
            v(LmRole::Goalgen, false, false),
            v(LmRole::Goalgen, true, false),
        ]
    }

    pub fn template(&self) -> &'static str {
        match (self.role, self.cot, self.human_tips) {
            (LmRole::Relabel, false, _) => RELABEL_BASE,
            (LmRole::Relabel, true, false) => RELABEL_COT,
            (LmRole::Relabel, true, true) => RELABEL_TIPS,
            (LmRole::Reward, false, _) => REWARD_BASE,
            (LmRole::Reward, true, _) => REWARD_COT,
            (LmRole::Goalgen, false, _) => GOALGEN_BASE,
            (LmRole::Goalgen, true, _) => GOALGEN_COT,
        }
    }
}

/// Trajectory block in the same layout as the worked examples:
/// fenced with `"""`, one `Step N.` / `Action N:` / `Observation N:` triple
/// per transition.
pub fn serialize_trajectory(traj: &Trajectory) -> String {
    let mut out = String::from("\"\"\"\n");
    for record in &traj.steps {
        let n = record.step;
        out.push_str(&format!(
            "Step {n}.\nAction {n}: {}\nObservation {n}: {}\n",
            record.action, record.observation
        ));
    }
    out.push_str("\"\"\"");
    out
}

pub fn render_relabel_prompt(traj: &Trajectory, variant: PromptVariant) -> Result<String, PromptError> {
    if variant.role != LmRole::Relabel {
        return Err(PromptError::InvalidVariant("not a relabel variant"));
    }
    if traj.is_empty() {
        return Err(PromptError::TrajectoryEmpty);
    }
    Ok(variant.template().replace(TRAJECTORY_SLOT, &serialize_trajectory(traj)))
}

/// Goals rendered as `"a", "b", "c"`. Double quotes inside a goal become
/// single quotes so the list stays unambiguous.
pub(crate) fn quote_goals<S: AsRef<str>>(goals: &[S]) -> String {
    let quoted: Vec<String> = goals.iter().map(|g| format!("\"{}\"", g.as_ref().replace('"', "'"))).collect();
    quoted.join(", ")
}

pub fn render_reward_prompt<S: AsRef<str>>(
    traj: &Trajectory,
    goals: &[S],
    cot: bool,
) -> Result<String, PromptError> {
    if goals.is_empty() {
        return Err(PromptError::NoGoals);
    }
    let variant = PromptVariant { role: LmRole::Reward, cot, human_tips: false };
    Ok(variant
        .template()
        .replace(TRAJECTORY_SLOT, &serialize_trajectory(traj))
        .replace(GOALS_SLOT, &quote_goals(goals)))
}

pub(crate) fn number_instructions<S: AsRef<str>>(instructions: &[S]) -> String {
    let lines: Vec<String> =
        instructions.iter().enumerate().map(|(i, s)| format!("#{} {}", i + 1, s.as_ref())).collect();
    lines.join("\n")
}

pub fn render_goalgen_prompt<S: AsRef<str>>(
    traj: &Trajectory,
    instructions: &[S],
    cot: bool,
) -> Result<String, PromptError> {
    if instructions.is_empty() {
        return Err(PromptError::NoInstructions);
    }
    if instructions.len() > MAX_INSTRUCTIONS {
        return Err(PromptError::TooManyInstructions(instructions.len()));
    }
    let variant = PromptVariant { role: LmRole::Goalgen, cot, human_tips: false };
    Ok(variant
        .template()
        .replace(TRAJECTORY_SLOT, &serialize_trajectory(traj))
        .replace(INSTRUCTIONS_SLOT, &number_instructions(instructions)))
}
