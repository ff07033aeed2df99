use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lm::DEFAULT_MODEL;
use crate::prompt::{MAX_INSTRUCTIONS, MAX_RELABELS};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("epsilon must lie in [0, 1], got {0}")]
    Epsilon(f64),
    #[error("unknown condition `{0}`")]
    UnknownCondition(String),
    #[error("{0} must be positive")]
    Zero(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExplorationConfig {
    /// Probability of cutting the last subgoal's sequence short.
    pub epsilon: f64,
    /// Episodes before the goal generator takes over.
    pub bootstrap_episodes: u64,
    pub max_relabels: usize,
    pub max_instructions: usize,
    pub model: String,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        ExplorationConfig {
            epsilon: 0.2,
            bootstrap_episodes: 4000,
            max_relabels: MAX_RELABELS,
            max_instructions: MAX_INSTRUCTIONS,
            model: String::from(DEFAULT_MODEL),
        }
    }
}

impl ExplorationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if self.max_relabels == 0 {
            return Err(ConfigError::Zero("max_relabels"));
        }
        if self.max_instructions < 2 {
            return Err(ConfigError::Zero("max_instructions"));
        }
        Ok(())
    }
}

/// The five experimental systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Lma3,
    NoTips,
    NoGoalgenNoTips,
    NoCotNoTips,
    OracleBaseline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConditionFlags {
    pub cot: bool,
    pub human_tips: bool,
    pub use_goal_generator: bool,
    /// Relabel and reward with the hand-coded evaluation goals instead of the LM.
    pub oracle_judges: bool,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Lma3,
        Condition::NoTips,
        Condition::NoGoalgenNoTips,
        Condition::NoCotNoTips,
        Condition::OracleBaseline,
    ];

    pub fn flags(self) -> ConditionFlags {
        let f = |cot, human_tips, use_goal_generator, oracle_judges| ConditionFlags {
            cot,
            human_tips,
            use_goal_generator,
            oracle_judges,
        };
        match self {
            Condition::Lma3 => f(true, true, true, false),
            Condition::NoTips => f(true, false, true, false),
            Condition::NoGoalgenNoTips => f(true, false, false, false),
            Condition::NoCotNoTips => f(false, false, true, false),
            Condition::OracleBaseline => f(false, false, false, true),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Lma3 => "lma3",
            Condition::NoTips => "no_tips",
            Condition::NoGoalgenNoTips => "no_goalgen_no_tips",
            Condition::NoCotNoTips => "no_cot_no_tips",
            Condition::OracleBaseline => "oracle_baseline",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::UnknownCondition(s.into()))
    }
}
