use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::canonical_goal;

/// Stored skill for one goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalEntry {
    /// Shortest action sequence from reset known to reach the goal.
    pub actions: Vec<String>,
    pub first_episode: u64,
    pub achieved_count: u64,
}

/// What a registry update did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Update {
    Inserted,
    Shortened,
    Kept,
}

/// The agent's memory: goal texts to action sequences, plus lifetime action
/// counts used for rarity sampling.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalRegistry {
    pub goals: BTreeMap<String, GoalEntry>,
    pub occurrences: BTreeMap<String, u64>,
}

impl GoalRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn get(&self, goal: &str) -> Option<&GoalEntry> {
        self.goals.get(&canonical_goal(goal))
    }

    pub fn contains(&self, goal: &str) -> bool {
        self.get(goal).is_some()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.goals.keys().map(String::as_str)
    }

    /// Registers a verified completion. The stored sequence is replaced only
    /// by a strictly shorter one.
    pub fn record(&mut self, goal: &str, actions: &[String], episode: u64) -> Update {
        let update = self.merge(goal, actions, episode);
        if let Some(entry) = self.goals.get_mut(&canonical_goal(goal)) {
            entry.achieved_count += 1;
        }
        update
    }

    /// Like [`record`](Self::record) without touching achievement counts.
    /// New entries start at count 0.
    pub fn merge(&mut self, goal: &str, actions: &[String], episode: u64) -> Update {
        let key = canonical_goal(goal);
        if key.is_empty() {
            return Update::Kept;
        }
        match self.goals.get_mut(&key) {
            None => {
                self.goals.insert(
                    key,
                    GoalEntry { actions: actions.to_vec(), first_episode: episode, achieved_count: 0 },
                );
                Update::Inserted
            }
            Some(entry) if actions.len() < entry.actions.len() => {
                entry.actions = actions.to_vec();
                Update::Shortened
            }
            Some(_) => Update::Kept,
        }
    }

    /// Counts an achievement of an already registered goal.
    pub fn bump(&mut self, goal: &str) -> bool {
        match self.goals.get_mut(&canonical_goal(goal)) {
            Some(entry) => {
                entry.achieved_count += 1;
                true
            }
            None => false,
        }
    }

    pub fn occurrence(&self, action: &str) -> u64 {
        self.occurrences.get(action).copied().unwrap_or(0)
    }

    pub fn note_action(&mut self, action: &str, times: u64) {
        *self.occurrences.entry(action.into()).or_insert(0) += times;
    }
}
