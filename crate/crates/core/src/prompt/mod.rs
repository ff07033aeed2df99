//! Prompt rendering for the relabeler, reward function and goal generator,
//! and the parsers that turn free-form LM answers back into structured data.
//!
//! Templates are shipped as text assets under `templates/` with three named
//! slots: `<<trajectory>>`, `<<goals>>` and `<<instructions>>`. Everything
//! outside the slots is reproduced byte for byte.

mod parse;
mod render;

pub use parse::{
    answer_text, parse_goalgen_response, parse_relabel_response, parse_reward_response, EpisodePlan,
    PlanError, RelabelResult, RewardVerdict, Subgoal,
};
pub use render::{
    render_goalgen_prompt, render_relabel_prompt, render_reward_prompt, serialize_trajectory, PromptError,
    PromptVariant, MAX_INSTRUCTIONS, MAX_RELABELS,
};

/// Raw template text, slots unfilled.
pub mod templates {
    pub const RELABEL_BASE: &str = include_str!("../../templates/relabel_base.txt");
    pub const RELABEL_COT: &str = include_str!("../../templates/relabel_cot.txt");
    pub const RELABEL_TIPS: &str = include_str!("../../templates/relabel_tips.txt");
    pub const REWARD_BASE: &str = include_str!("../../templates/reward_base.txt");
    pub const REWARD_COT: &str = include_str!("../../templates/reward_cot.txt");
    pub const GOALGEN_BASE: &str = include_str!("../../templates/goalgen_base.txt");
    pub const GOALGEN_COT: &str = include_str!("../../templates/goalgen_cot.txt");

    pub const TRAJECTORY_SLOT: &str = "<<trajectory>>";
    pub const GOALS_SLOT: &str = "<<goals>>";
    pub const INSTRUCTIONS_SLOT: &str = "<<instructions>>";

    /// Opening words that identify which component a prompt belongs to.
    pub const RELABEL_MARKER: &str = "list the most interesting, impressive, novel or creative goals";
    pub const REWARD_MARKER: &str = "tell me whether the player achieves these goals";
    pub const GOALGEN_MARKER: &str = "find a sequence of 2, 3, or 4 instructions";
}
