//! The autotelic episode loop.
//!
//! Each episode picks a plan (random actions, a known goal, or a composed
//! goal from the goal generator), plays it with exploration, asks the
//! relabeler what was achieved, verifies everything with one reward call, and
//! stores the verified prefixes under the shortest-sequence rule.

mod config;
mod explore;
mod registry;

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{Condition, ConditionFlags, ConfigError, ExplorationConfig};
pub use explore::{chain_sequences, execute_plan, rarity_weights, sample_rare, Execution};
pub use registry::{GoalEntry, GoalRegistry, Update};

use crate::lm::{Backend, ChatRequest, LanguageModel, LmError, LmRole};
use crate::oracle::{eval_goals, oracle_relabel, oracle_reward, EvalGoal};
use crate::prompt::{
    answer_text, parse_goalgen_response, parse_relabel_response, parse_reward_response,
    render_goalgen_prompt, render_relabel_prompt, render_reward_prompt, EpisodePlan, PromptError,
    PromptVariant, RewardVerdict,
};
use crate::text::canonical_goal;
use crate::trajectory::Trajectory;
use crate::world::World;

/// Relabels, verdicts, replay records and newly registered goals of one
/// processed episode.
pub type Findings = (Vec<(String, u32)>, Vec<RewardVerdict>, Vec<ReplayRecord>, Vec<String>);

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// How an episode's actions were chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanChoice {
    Random,
    Bootstrap { goal: String },
    Generated { plan: EpisodePlan },
}

impl PlanChoice {
    pub fn main_goal(&self) -> Option<&str> {
        match self {
            PlanChoice::Random => None,
            PlanChoice::Bootstrap { goal } => Some(goal),
            PlanChoice::Generated { plan } => Some(&plan.main_goal),
        }
    }

    pub fn subgoal_texts(&self) -> Vec<&str> {
        match self {
            PlanChoice::Generated { plan } => plan.subgoals.iter().map(|s| s.text.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplaySource {
    Relabel,
    MainGoal,
    Subgoal,
}

/// A verified goal completion: the prefix of the episode up to the
/// completion step, rewarded 1 on its last step only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub goal: String,
    pub episode: u64,
    pub source: ReplaySource,
    pub completion_step: u32,
    pub actions: Vec<String>,
}

impl ReplayRecord {
    pub fn rewards(&self) -> Vec<u8> {
        let mut r = alloc::vec![0; self.actions.len()];
        if let Some(last) = r.last_mut() {
            *last = 1;
        }
        r
    }
}

/// Audit entry for one LM call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub episode: u64,
    pub role: LmRole,
    pub backend: Backend,
    pub prompt_tokens: u32,
    pub response_tokens: u32,
    /// Relabels, verdicts or instructions the call carried or produced.
    pub items: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub episode: u64,
    pub plan: PlanChoice,
    pub trajectory: Trajectory,
    pub planned: usize,
    pub truncated_at: Option<usize>,
    pub relabels: Vec<(String, u32)>,
    pub verdicts: Vec<RewardVerdict>,
    pub records: Vec<ReplayRecord>,
    pub calls: Vec<CallRecord>,
    pub new_goals: Vec<String>,
}

/// Everything that persists between episodes of one seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub seed: u64,
    pub episodes_done: u64,
    pub registry: GoalRegistry,
    pub last_trajectory: Option<Trajectory>,
}

impl AgentState {
    pub fn new(seed: u64) -> Self {
        AgentState { seed, episodes_done: 0, registry: GoalRegistry::new(), last_trajectory: None }
    }
}

/// Generator for one episode, determined by seed and episode number alone.
pub fn episode_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode);
    rng
}

/// A configured agent: world, LM backend, condition and exploration knobs.
pub struct Agent<'a> {
    pub world: &'a World,
    pub lm: &'a dyn LanguageModel,
    pub config: ExplorationConfig,
    pub condition: Condition,
    eval: Vec<EvalGoal>,
}

impl<'a> Agent<'a> {
    pub fn new(
        world: &'a World,
        lm: &'a dyn LanguageModel,
        condition: Condition,
        config: ExplorationConfig,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        Ok(Agent { world, lm, config, condition, eval: eval_goals(world) })
    }

    pub fn flags(&self) -> ConditionFlags {
        self.condition.flags()
    }

    fn call(
        &self,
        role: LmRole,
        prompt: String,
        episode: u64,
        calls: &mut Vec<CallRecord>,
    ) -> Result<String, LmError> {
        let request = ChatRequest::for_role(role, &self.config.model, prompt);
        let response = self.lm.complete(&request)?;
        calls.push(CallRecord {
            episode,
            role,
            backend: response.backend,
            prompt_tokens: crate::lm::estimate_tokens(request.prompt()),
            response_tokens: response.token_estimate,
            items: 0,
        });
        Ok(answer_text(request.prompt(), &response.content))
    }

    /// Picks the plan for `episode` (1-based).
    pub fn select_plan<R: Rng + ?Sized>(
        &self,
        episode: u64,
        registry: &GoalRegistry,
        last: Option<&Trajectory>,
        rng: &mut R,
        calls: &mut Vec<CallRecord>,
    ) -> Result<PlanChoice, AgentError> {
        if episode <= 1 || registry.is_empty() {
            return Ok(PlanChoice::Random);
        }
        let bootstrap = |rng: &mut R| {
            let i = rng.random_range(0..registry.len());
            let goal = registry.keys().nth(i).unwrap_or_default();
            PlanChoice::Bootstrap { goal: goal.into() }
        };
        if !self.flags().use_goal_generator || episode <= self.config.bootstrap_episodes || registry.len() < 2
        {
            return Ok(bootstrap(rng));
        }
        let keys: Vec<&str> = registry.keys().collect();
        let n = keys.len().min(self.config.max_instructions);
        let instructions: Vec<&str> = sample(rng, keys.len(), n).into_iter().map(|i| keys[i]).collect();
        let empty = Trajectory::new();
        let prompt = render_goalgen_prompt(last.unwrap_or(&empty), &instructions, self.flags().cot)?;
        let answer = self.call(LmRole::Goalgen, prompt, episode, calls)?;
        if let Some(c) = calls.last_mut() {
            c.items = instructions.len();
        }
        match parse_goalgen_response(&answer, &instructions) {
            Ok(plan) => Ok(PlanChoice::Generated { plan }),
            Err(_) => Ok(bootstrap(rng)),
        }
    }

    /// Relabels and verifies an episode and updates the registry.
    pub fn process_episode(
        &self,
        episode: u64,
        trajectory: &Trajectory,
        plan: &PlanChoice,
        registry: &mut GoalRegistry,
        calls: &mut Vec<CallRecord>,
    ) -> Result<Findings, AgentError> {
        let flags = self.flags();
        let events = trajectory.events();
        let relabels: Vec<(String, u32)> = if trajectory.is_empty() {
            Vec::new()
        } else if flags.oracle_judges {
            oracle_relabel(&self.eval, &events).entries
        } else {
            let variant = PromptVariant::new(LmRole::Relabel, flags.cot, flags.human_tips)?;
            let prompt = render_relabel_prompt(trajectory, variant)?;
            let answer = self.call(LmRole::Relabel, prompt, episode, calls)?;
            let mut parsed = parse_relabel_response(&answer).within(trajectory.len());
            parsed.entries.truncate(self.config.max_relabels);
            if let Some(c) = calls.last_mut() {
                c.items = parsed.len();
            }
            parsed.entries
        };

        let mut goals: Vec<(String, ReplaySource)> = Vec::new();
        let mut push = |goal: &str, source: ReplaySource| {
            let goal = canonical_goal(goal);
            if goal.is_empty() {
                return;
            }
            let lower = goal.to_lowercase();
            if !goals.iter().any(|(g, _)| g.to_lowercase() == lower) {
                goals.push((goal, source));
            }
        };
        if let Some(main) = plan.main_goal() {
            push(main, ReplaySource::MainGoal);
        }
        for (goal, _) in &relabels {
            push(goal, ReplaySource::Relabel);
        }
        for sub in plan.subgoal_texts() {
            push(sub, ReplaySource::Subgoal);
        }

        let verdicts: Vec<RewardVerdict> = if goals.is_empty() {
            Vec::new()
        } else if flags.oracle_judges {
            goals
                .iter()
                .map(|(g, _)| match self.eval.iter().find(|e| e.canonical() == *g) {
                    Some(eval) => oracle_reward(eval, &events),
                    None => RewardVerdict::no(g),
                })
                .collect()
        } else {
            let texts: Vec<&str> = goals.iter().map(|(g, _)| g.as_str()).collect();
            let prompt = render_reward_prompt(trajectory, &texts, flags.cot)?;
            let answer = self.call(LmRole::Reward, prompt, episode, calls)?;
            if let Some(c) = calls.last_mut() {
                c.items = texts.len();
            }
            parse_reward_response(&answer, &texts)
        };

        let mut records = Vec::new();
        let mut new_goals = Vec::new();
        for ((goal, source), verdict) in goals.iter().zip(&verdicts) {
            let Some(step) = verdict.step.filter(|s| *s >= 1 && (*s as usize) <= trajectory.len()) else {
                continue;
            };
            let actions = trajectory.action_prefix(step as usize);
            match source {
                ReplaySource::Subgoal => {
                    registry.bump(goal);
                }
                _ => {
                    if registry.record(goal, &actions, episode) == Update::Inserted {
                        new_goals.push(goal.clone());
                    }
                }
            }
            records.push(ReplayRecord {
                goal: goal.clone(),
                episode,
                source: *source,
                completion_step: step,
                actions,
            });
        }
        Ok((relabels, verdicts, records, new_goals))
    }

    /// Runs the next episode. On error `state` is left unchanged.
    pub fn run_episode(&self, state: &mut AgentState) -> Result<EpisodeOutcome, AgentError> {
        let episode = state.episodes_done + 1;
        let mut rng = episode_rng(state.seed, episode);
        let mut calls = Vec::new();
        let plan =
            self.select_plan(episode, &state.registry, state.last_trajectory.as_ref(), &mut rng, &mut calls)?;

        let sequences: Vec<&[String]> = match &plan {
            PlanChoice::Random => Vec::new(),
            PlanChoice::Bootstrap { goal } => {
                state.registry.get(goal).map(|e| alloc::vec![e.actions.as_slice()]).unwrap_or_default()
            }
            PlanChoice::Generated { plan } => plan
                .subgoals
                .iter()
                .filter_map(|s| state.registry.get(&s.text))
                .map(|e| e.actions.as_slice())
                .collect(),
        };
        let exec = execute_plan(self.world, &sequences, &state.registry, self.config.epsilon, &mut rng);

        let mut registry = state.registry.clone();
        let (relabels, verdicts, records, new_goals) =
            self.process_episode(episode, &exec.trajectory, &plan, &mut registry, &mut calls)?;
        for (action, n) in &exec.counted {
            registry.note_action(action, *n);
        }

        state.registry = registry;
        state.episodes_done = episode;
        state.last_trajectory = Some(exec.trajectory.clone());
        Ok(EpisodeOutcome {
            episode,
            plan,
            trajectory: exec.trajectory,
            planned: exec.planned,
            truncated_at: exec.truncated_at,
            relabels,
            verdicts,
            records,
            calls,
            new_goals,
        })
    }
}
