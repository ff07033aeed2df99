use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::borrow::Borrow;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::eval::{oracle_relabel, EvalGoal};
use super::goals::GoalPredicate;
use crate::agent::GoalRegistry;
use crate::lm::{ChatRequest, LanguageModel, LmError, LmRole};
use crate::prompt::{answer_text, parse_reward_response, render_reward_prompt};
use crate::text::canonical_goal;
use crate::trajectory::Trajectory;
use crate::world::World;

/// Goals drawn for one self-evaluation set.
pub const SELF_EVAL_SAMPLE: usize = 200;

/// Merges every evaluation goal `trajectory` achieves into `registry` under
/// the shortest-sequence rule. Returns how many entries changed.
pub fn finetune_trajectory(
    goals: &[EvalGoal],
    episode: u64,
    trajectory: &Trajectory,
    registry: &mut GoalRegistry,
) -> usize {
    let relabels = oracle_relabel(goals, &trajectory.events());
    let mut changed = 0;
    for (goal, step) in relabels.entries {
        let prefix = trajectory.action_prefix(step as usize);
        if registry.merge(&goal, &prefix, episode) != crate::agent::Update::Kept {
            changed += 1;
        }
    }
    changed
}

/// Sweeps an archive of `(episode, trajectory)` pairs with the oracle
/// relabeler. Pure: no environment steps, no LM calls.
pub fn oracle_finetune<I, T>(goals: &[EvalGoal], archive: I, registry: &GoalRegistry) -> GoalRegistry
where
    I: IntoIterator<Item = (u64, T)>,
    T: Borrow<Trajectory>,
{
    let mut out = registry.clone();
    for (episode, traj) in archive {
        finetune_trajectory(goals, episode, traj.borrow(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalOutcome {
    pub goal: String,
    pub achieved: bool,
    pub step: Option<u32>,
    pub sequence_len: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessReport {
    pub outcomes: Vec<GoalOutcome>,
}

impl SuccessReport {
    pub fn successes(&self) -> usize {
        self.outcomes.iter().filter(|o| o.achieved).count()
    }

    /// Mean success; 0 for an empty report.
    pub fn rate(&self) -> f64 {
        if self.outcomes.is_empty() {
            0.0
        } else {
            self.successes() as f64 / self.outcomes.len() as f64
        }
    }
}

/// Replays the stored sequence for `goal` (exact canonical match) from
/// reset, capped at the horizon.
pub fn replay_goal(world: &World, registry: &GoalRegistry, goal: &str) -> Option<Trajectory> {
    let entry = registry.get(goal)?;
    let n = entry.actions.len().min(world.horizon() as usize);
    Trajectory::rollout(world, &entry.actions[..n]).ok().map(|(t, _)| t)
}

/// Success on the evaluation goals, judged by their predicates.
pub fn evaluate_success(world: &World, registry: &GoalRegistry, goals: &[EvalGoal]) -> SuccessReport {
    let outcomes = goals
        .iter()
        .map(|g| {
            let replay = replay_goal(world, registry, g.text);
            let step = replay.as_ref().and_then(|t| g.predicate.completion_step(&t.events()));
            GoalOutcome {
                goal: g.canonical(),
                achieved: step.is_some(),
                step,
                sequence_len: replay.map(|t| t.len()),
            }
        })
        .collect();
    SuccessReport { outcomes }
}

/// Who decides whether a replayed goal was reached.
#[derive(Clone, Copy)]
pub enum Judge<'a> {
    /// The goal grammar; texts outside it count as failures.
    Oracle,
    Lm {
        lm: &'a dyn LanguageModel,
        model: &'a str,
        cot: bool,
    },
}

/// Samples up to [`SELF_EVAL_SAMPLE`] goals uniformly from `goals`, replays
/// each from the registry and asks `judge` about it.
pub fn self_evaluate<S: AsRef<str>, R: Rng + ?Sized>(
    world: &World,
    registry: &GoalRegistry,
    goals: &[S],
    judge: Judge<'_>,
    rng: &mut R,
) -> Result<SuccessReport, LmError> {
    let n = goals.len().min(SELF_EVAL_SAMPLE);
    let mut picks = sample(rng, goals.len(), n).into_vec();
    picks.sort_unstable();
    let mut outcomes = Vec::with_capacity(n);
    for i in picks {
        let goal = canonical_goal(goals[i].as_ref());
        let replay = replay_goal(world, registry, &goal);
        let step = match (&replay, judge) {
            (None, _) => None,
            (Some(t), Judge::Oracle) => {
                GoalPredicate::resolve(world, &goal).and_then(|p| p.completion_step(&t.events()))
            }
            (Some(t), Judge::Lm { lm, model, cot }) => {
                let goal_list = [goal.to_owned()];
                let prompt = render_reward_prompt(t, &goal_list, cot)
                    .map_err(|e| LmError::InvalidRequest(alloc::format!("{e}")))?;
                let request = ChatRequest::for_role(LmRole::Reward, model, prompt);
                let response = lm.complete(&request)?;
                let answer = answer_text(request.prompt(), &response.content);
                parse_reward_response(&answer, &goal_list)
                    .pop()
                    .and_then(|v| v.step)
                    .filter(|s| (*s as usize) <= t.len())
            }
        };
        outcomes.push(GoalOutcome {
            goal,
            achieved: step.is_some(),
            step,
            sequence_len: replay.map(|t| t.len()),
        });
    }
    Ok(SuccessReport { outcomes })
}
