//! Scripted stand-in for the language model.
//!
//! The oracle reads the same prompt a real model would. Because every episode
//! starts from reset in a deterministic world, replaying the `Action N:` lines
//! of the prompt's trajectory recovers the exact ground-truth events, and the
//! answers are then written from those events in the format the prompts ask
//! for. Any randomness is seeded from a hash of the prompt, so the oracle is a
//! pure function of its input.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::goals::{describe_event, GoalPredicate, THEN};
use crate::lm::{Backend, ChatRequest, ChatResponse, LanguageModel, LmError, LmRole};
use crate::prompt::templates::{GOALGEN_MARKER, RELABEL_MARKER, REWARD_MARKER};
use crate::prompt::MAX_RELABELS;
use crate::text::fnv1a64;
use crate::trajectory::Trajectory;
use crate::world::{GroundEvent, World};

/// Structured input for a scripted answer.
#[derive(Clone, Debug)]
pub enum OracleContext {
    Relabel { events: Vec<GroundEvent>, cot: bool, seed: u64 },
    Reward { events: Vec<GroundEvent>, goals: Vec<String>, cot: bool },
    Goalgen { instructions: Vec<String>, cot: bool, seed: u64 },
}

impl OracleContext {
    pub fn role(&self) -> LmRole {
        match self {
            OracleContext::Relabel { .. } => LmRole::Relabel,
            OracleContext::Reward { .. } => LmRole::Reward,
            OracleContext::Goalgen { .. } => LmRole::Goalgen,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScriptedOracle {
    world: World,
}

impl ScriptedOracle {
    pub fn new(world: World) -> Self {
        ScriptedOracle { world }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// Answers a structured request.
    pub fn respond(&self, context: &OracleContext) -> ChatResponse {
        let content = match context {
            OracleContext::Relabel { events, cot, seed } => self.relabel(events, *cot, *seed),
            OracleContext::Reward { events, goals, cot } => self.reward(events, goals, *cot),
            OracleContext::Goalgen { instructions, cot, seed } => goalgen(instructions, *cot, *seed),
        };
        ChatResponse::new(content, Backend::Oracle)
    }

    /// Distinct event descriptions at their first step; a seeded sample of
    /// ten when there are more, listed in step order.
    fn relabel(&self, events: &[GroundEvent], cot: bool, seed: u64) -> String {
        let mut described: Vec<(String, u32)> = Vec::new();
        for event in events {
            let text = describe_event(&self.world, &event.kind);
            if !described.iter().any(|(t, _)| *t == text) {
                described.push((text, event.step));
            }
        }
        if described.len() > MAX_RELABELS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut keep = sample(&mut rng, described.len(), MAX_RELABELS).into_vec();
            keep.sort_unstable();
            described = keep.into_iter().map(|i| described[i].clone()).collect();
        }
        let mut out = String::new();
        if cot {
            out.push_str(&format!(
                " The player achieved {} things worth describing, listed in the order they happened.\nAnswer:\n",
                described.len()
            ));
        }
        for (text, step) in &described {
            out.push_str(&format!("- {text} (step {step}).\n"));
        }
        out
    }

    fn reward(&self, events: &[GroundEvent], goals: &[String], cot: bool) -> String {
        let mut out = String::new();
        for goal in goals {
            let step = GoalPredicate::resolve(&self.world, goal).and_then(|p| p.completion_step(events));
            out.push_str(&format!("- {goal}."));
            if cot {
                match step {
                    Some(s) => out.push_str(&format!(" Reasoning: the goal is first completed in step {s}.")),
                    None => out.push_str(" Reasoning: the player never completes this goal."),
                }
            }
            match step {
                Some(s) => out.push_str(&format!(" Answer: yes (step {s}).\n")),
                None => out.push_str(" Answer: no.\n"),
            }
        }
        out
    }

    /// Builds the structured context a prompt describes.
    pub fn context_from_prompt(&self, prompt: &str) -> Option<OracleContext> {
        let tail = example_three(prompt);
        let seed = fnv1a64(prompt.as_bytes());
        if prompt.contains(RELABEL_MARKER) {
            Some(OracleContext::Relabel { events: self.replay(tail), cot: is_cot(tail), seed })
        } else if prompt.contains(REWARD_MARKER) {
            Some(OracleContext::Reward {
                events: self.replay(tail),
                goals: goal_list(tail),
                cot: is_cot(tail),
            })
        } else if prompt.contains(GOALGEN_MARKER) {
            Some(OracleContext::Goalgen { instructions: instruction_list(tail), cot: is_cot(tail), seed })
        } else {
            None
        }
    }

    fn replay(&self, text: &str) -> Vec<GroundEvent> {
        let actions: Vec<&str> = text
            .lines()
            .filter_map(|line| {
                let rest = line.strip_prefix("Action ")?;
                let (num, action) = rest.split_once(": ")?;
                num.bytes().all(|b| b.is_ascii_digit()).then_some(action)
            })
            .take(self.world.horizon() as usize)
            .collect();
        Trajectory::rollout(&self.world, &actions).map(|(traj, _)| traj.events()).unwrap_or_default()
    }
}

impl LanguageModel for ScriptedOracle {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LmError> {
        let context = self
            .context_from_prompt(request.prompt())
            .ok_or_else(|| LmError::InvalidRequest("prompt not recognized by the oracle".into()))?;
        let mut response = self.respond(&context);
        if request.prompt().ends_with('-') {
            if let Some(rest) = response.content.strip_prefix('-') {
                response = ChatResponse::new(rest.into(), Backend::Oracle);
            }
        }
        Ok(response)
    }
}

fn is_cot(tail: &str) -> bool {
    tail.contains("Let's think step by step") || tail.trim_end().ends_with("Reasoning:")
}

/// Text after the last "Example 3:" header; the slots live there.
fn example_three(prompt: &str) -> &str {
    prompt.rfind("Example 3:").map_or(prompt, |i| &prompt[i..])
}

fn goal_list(tail: &str) -> Vec<String> {
    const HEAD: &str = "Here is the list of goals: \"";
    let Some(start) = tail.rfind(HEAD) else {
        return Vec::new();
    };
    let body = &tail[start + HEAD.len()..];
    let Some(end) = body.rfind("\". Let's") else {
        return Vec::new();
    };
    body[..end].split("\", \"").map(ToString::to_string).collect()
}

fn instruction_list(tail: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in tail.lines() {
        let Some(rest) = line.strip_prefix('#') else {
            continue;
        };
        let Some((num, text)) = rest.split_once(' ') else {
            continue;
        };
        if num.parse::<usize>() == Ok(out.len() + 1) {
            out.push(text.to_string());
        }
    }
    out
}

/// Chains 2 to 4 distinct instructions drawn uniformly.
fn goalgen(instructions: &[String], cot: bool, seed: u64) -> String {
    if instructions.len() < 2 {
        return String::from("There are not enough instructions to combine into a new goal.");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(2..=instructions.len().min(4));
    let picks = sample(&mut rng, instructions.len(), count).into_vec();
    let texts: Vec<&str> = picks.iter().map(|&i| instructions[i].as_str()).collect();
    let items: Vec<String> = picks.iter().map(|&i| format!("{} (#{})", instructions[i], i + 1)).collect();
    let answer = format!("goal: {}. instructions: {}.", texts.join(THEN), items.join("; "));
    if cot {
        format!(" You could chain {count} instructions one after the other.\nAnswer: {answer}")
    } else {
        format!(" {answer}")
    }
}
