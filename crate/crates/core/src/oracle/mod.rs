//! Ground truth: the hand-coded evaluation goals, oracle relabel and reward,
//! the interaction-free finetune sweep, success evaluation, confusion
//! matrices, and a scripted LM built on the same predicates.

mod confusion;
mod eval;
mod goals;
mod script;
mod sweep;

pub use confusion::{confusion, ConfusionMatrix, LengthMismatch};
pub use eval::{eval_goals, oracle_relabel, oracle_reward, EvalGoal, EVAL_GOAL_TEXTS};
pub use goals::{describe_event, EventPattern, GoalPredicate, RECIPE_GOAL, THEN};
pub use script::{OracleContext, ScriptedOracle};
pub use sweep::{
    evaluate_success, finetune_trajectory, oracle_finetune, replay_goal, self_evaluate, GoalOutcome, Judge,
    SuccessReport, SELF_EVAL_SAMPLE,
};
