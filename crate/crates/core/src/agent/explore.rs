//! Plan execution: chaining stored sequences, epsilon truncation and the
//! rarity-weighted random tail.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::registry::GoalRegistry;
use crate::trajectory::{StepRecord, Trajectory};
use crate::world::World;

/// Concatenates `sequences`. With probability `epsilon` the last one is cut
/// at a uniform position in `0..len`; the cut point is returned as the number
/// of its actions that were kept.
pub fn chain_sequences<S: AsRef<[String]>, R: Rng + ?Sized>(
    sequences: &[S],
    epsilon: f64,
    rng: &mut R,
) -> (Vec<String>, Option<usize>) {
    let mut out: Vec<String> = Vec::new();
    let Some((last, head)) = sequences.split_last() else {
        return (out, None);
    };
    for seq in head {
        out.extend_from_slice(seq.as_ref());
    }
    let last = last.as_ref();
    let mut cut = None;
    if !last.is_empty() && rng.random::<f64>() < epsilon {
        cut = Some(rng.random_range(0..last.len()));
    }
    out.extend_from_slice(&last[..cut.unwrap_or(last.len())]);
    (out, cut)
}

/// Sampling weights proportional to 1 / occurrence count, unseen actions
/// counting as 1.
pub fn rarity_weights<F: Fn(&str) -> u64>(actions: &[&str], count: F) -> Vec<f64> {
    actions.iter().map(|a| 1.0 / count(a).max(1) as f64).collect()
}

/// Index of an action drawn with [`rarity_weights`].
pub fn sample_rare<F: Fn(&str) -> u64, R: Rng + ?Sized>(
    actions: &[&str],
    count: F,
    rng: &mut R,
) -> Option<usize> {
    if actions.is_empty() {
        return None;
    }
    let dist = WeightedIndex::new(rarity_weights(actions, count)).ok()?;
    Some(dist.sample(rng))
}

/// Result of playing one plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub trajectory: Trajectory,
    /// Actions taken from stored sequences before the random tail.
    pub planned: usize,
    pub truncated_at: Option<usize>,
    /// Occurrence increments produced by this episode.
    pub counted: BTreeMap<String, u64>,
}

/// Plays the chained `sequences` from reset and fills the rest of the
/// horizon with rarity-weighted admissible actions. Occurrence counts seen by
/// the tail include the episode's own earlier actions; the registry itself is
/// not modified.
pub fn execute_plan<S: AsRef<[String]>, R: Rng + ?Sized>(
    world: &World,
    sequences: &[S],
    registry: &GoalRegistry,
    epsilon: f64,
    rng: &mut R,
) -> Execution {
    let (chained, truncated_at) = chain_sequences(sequences, epsilon, rng);
    let horizon = world.horizon() as usize;
    let mut counted: BTreeMap<String, u64> = BTreeMap::new();
    let mut trajectory = Trajectory::new();
    let mut state = world.reset();
    let mut planned = 0;

    let mut take =
        |action: &str, state: &mut crate::world::WorldState, counted: &mut BTreeMap<String, u64>| {
            let outcome = world.step(state, action).expect("step count stays below the horizon");
            *counted.entry(action.into()).or_insert(0) += 1;
            trajectory.push(StepRecord {
                step: outcome.state.step,
                action: action.into(),
                observation: outcome.observation,
                events: outcome.events,
            });
            *state = outcome.state;
        };

    for action in chained.iter().take(horizon) {
        take(action, &mut state, &mut counted);
        planned += 1;
    }
    while (state.step as usize) < horizon {
        let admissible = world.admissible_actions(&state);
        let count = |a: &str| registry.occurrence(a) + counted.get(a).copied().unwrap_or(0);
        let Some(i) = sample_rare(&admissible, count, rng) else {
            break;
        };
        let action = String::from(admissible[i]);
        take(&action, &mut state, &mut counted);
    }
    Execution { trajectory, planned, truncated_at, counted }
}
