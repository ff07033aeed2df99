use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::world::{GroundEvent, World, WorldError, WorldState};

/// One transition: the action taken at `step` (1-based) and what came back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u32,
    pub action: String,
    pub observation: String,
    pub events: Vec<GroundEvent>,
}

/// An episode from reset. Step numbers are 1-based, so the first `t` records
/// are exactly the actions needed to reproduce anything that happened at
/// step `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, record: StepRecord) {
        self.steps.push(record);
    }

    pub fn actions(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.action.as_str())
    }

    /// The first `len` actions.
    pub fn action_prefix(&self, len: usize) -> Vec<String> {
        self.steps.iter().take(len).map(|s| s.action.clone()).collect()
    }

    pub fn events(&self) -> Vec<GroundEvent> {
        self.steps.iter().flat_map(|s| s.events.iter().copied()).collect()
    }

    /// Replays `actions` from reset, stopping early at the horizon. Returns
    /// the trajectory and the final state.
    pub fn rollout<S: AsRef<str>>(
        world: &World,
        actions: &[S],
    ) -> Result<(Trajectory, WorldState), WorldError> {
        let mut state = world.reset();
        let mut traj = Trajectory::new();
        for action in actions {
            let outcome = world.step(&state, action.as_ref())?;
            traj.push(StepRecord {
                step: outcome.state.step,
                action: String::from(action.as_ref()),
                observation: outcome.observation,
                events: outcome.events,
            });
            state = outcome.state;
        }
        Ok((traj, state))
    }
}
