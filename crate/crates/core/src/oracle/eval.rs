//! The 69 hand-coded evaluation goals and the oracle reward and relabel
//! functions built on them.

use alloc::string::String;
use alloc::vec::Vec;

use super::goals::GoalPredicate;
use crate::prompt::{RelabelResult, RewardVerdict};
use crate::text::canonical_goal;
use crate::world::{GroundEvent, World};

pub const EVAL_GOAL_TEXTS: [&str; 69] = [
    "cook the green apple",
    "cook the red apple",
    "cook the red potato",
    "cook the yellow apple",
    "cook the yellow potato",
    "fry the green apple",
    "fry the red apple",
    "fry the red potato",
    "fry the yellow apple",
    "fry the yellow potato",
    "grill the green apple",
    "grill the red apple",
    "grill the red potato",
    "grill the yellow apple",
    "grill the yellow potato",
    "roast the green apple",
    "roast the red apple",
    "roast the red potato",
    "roast the yellow apple",
    "roast the yellow potato",
    "cut the cilantro",
    "cut the green apple",
    "cut the parsley",
    "cut the red apple",
    "cut the red potato",
    "cut the yellow apple",
    "cut the yellow potato",
    "chop the cilantro",
    "chop the green apple",
    "chop the parsley",
    "chop the red apple",
    "chop the red potato",
    "chop the yellow apple",
    "chop the yellow potato",
    "dice the cilantro",
    "dice the green apple",
    "dice the parsley",
    "dice the red apple",
    "dice the red potato",
    "dice the yellow apple",
    "dice the yellow potato",
    "slice the cilantro",
    "slice the green apple",
    "slice the parsley",
    "slice the red apple",
    "slice the red potato",
    "slice the yellow apple",
    "slice the yellow potato",
    "eat the cilantro",
    "eat the green apple",
    "eat the parsley",
    "eat the red apple",
    "eat the yellow apple",
    "go to the kitchen",
    "open the cutlery drawer",
    "open the dishwasher",
    "open the fridge",
    "open the kitchen cupboard",
    "open the trash can",
    "You are hungry! Let's cook a delicious meal. Check the cookbook in the kitchen for the recipe. Once done, enjoy your meal!",
    "pick up the cilantro",
    "pick up the cookbook",
    "pick up the green apple",
    "pick up the knife",
    "pick up the parsley",
    "pick up the red apple",
    "pick up the red potato",
    "pick up the yellow apple",
    "pick up the yellow potato",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalGoal {
    /// 1-based position in [`EVAL_GOAL_TEXTS`].
    pub id: usize,
    pub text: &'static str,
    pub predicate: GoalPredicate,
}

impl EvalGoal {
    pub fn canonical(&self) -> String {
        canonical_goal(self.text)
    }
}

/// The evaluation set compiled against `world`.
pub fn eval_goals(world: &World) -> Vec<EvalGoal> {
    EVAL_GOAL_TEXTS
        .iter()
        .enumerate()
        .map(|(i, &text)| EvalGoal {
            id: i + 1,
            text,
            predicate: GoalPredicate::resolve(world, text)
                .expect("every evaluation goal is in the goal grammar"),
        })
        .collect()
}

pub fn oracle_reward(goal: &EvalGoal, events: &[GroundEvent]) -> RewardVerdict {
    match goal.predicate.completion_step(events) {
        Some(step) => RewardVerdict::yes(&goal.canonical(), step),
        None => RewardVerdict::no(&goal.canonical()),
    }
}

/// Every evaluation goal the events satisfy, with its completion step, in
/// evaluation-set order. Not capped.
pub fn oracle_relabel(goals: &[EvalGoal], events: &[GroundEvent]) -> RelabelResult {
    let entries = goals
        .iter()
        .filter_map(|g| g.predicate.completion_step(events).map(|step| (g.canonical(), step)))
        .collect();
    RelabelResult { entries }
}
