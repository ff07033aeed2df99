//! The fixture trajectory and golden renderings of every prompt variant.

use lma3_core::prompt::{render_goalgen_prompt, render_relabel_prompt, render_reward_prompt, PromptVariant};
use lma3_core::{LmRole, Trajectory, World};

pub fn fixture_trajectory() -> Trajectory {
    let world = World::cooking_world();
    let actions = ["move south", "open the fridge", "pick up the parsley", "eat the parsley"];
    Trajectory::rollout(&world, &actions).unwrap().0
}

pub const GOALS: [&str; 3] = ["open the fridge", "eat the parsley", "cook an omelet"];
pub const INSTRUCTIONS: [&str; 3] = ["go to the kitchen", "open the fridge", "pick up the parsley"];

pub fn golden_name(v: PromptVariant) -> String {
    let role = v.role.as_str();
    let kind = match (v.cot, v.human_tips) {
        (false, _) => "base",
        (true, false) => "cot",
        (true, true) => "tips",
    };
    format!("{role}_{kind}.txt")
}

pub fn render(v: PromptVariant) -> String {
    let traj = fixture_trajectory();
    match v.role {
        LmRole::Relabel => render_relabel_prompt(&traj, v).unwrap(),
        LmRole::Reward => render_reward_prompt(&traj, &GOALS, v.cot).unwrap(),
        LmRole::Goalgen => render_goalgen_prompt(&traj, &INSTRUCTIONS, v.cot).unwrap(),
    }
}

/// Checked-in golden text for a variant.
pub fn golden(v: PromptVariant) -> &'static str {
    match golden_name(v).as_str() {
        "relabel_base.txt" => include_str!("../fixtures/prompts/relabel_base.txt"),
        "relabel_cot.txt" => include_str!("../fixtures/prompts/relabel_cot.txt"),
        "relabel_tips.txt" => include_str!("../fixtures/prompts/relabel_tips.txt"),
        "reward_base.txt" => include_str!("../fixtures/prompts/reward_base.txt"),
        "reward_cot.txt" => include_str!("../fixtures/prompts/reward_cot.txt"),
        "goalgen_base.txt" => include_str!("../fixtures/prompts/goalgen_base.txt"),
        "goalgen_cot.txt" => include_str!("../fixtures/prompts/goalgen_cot.txt"),
        other => panic!("no golden file {other}"),
    }
}
