//! Core of a language-model-augmented autotelic agent.
//!
//! The agent invents, pursues, relabels and self-rewards linguistic goals in a
//! small deterministic kitchen world. Everything in this crate is pure
//! computation over owned data: the world simulator, prompt rendering and
//! response parsing, the hand-coded oracle goals, the episode loop, and the
//! repertoire diversity metrics. Transport, caching on disk, and the command
//! line live in the `lma3` crate.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod agent;
pub mod lm;
pub mod metrics;
pub mod oracle;
pub mod prompt;
pub mod text;
pub mod trajectory;
pub mod world;

pub use agent::{
    AgentState, Condition, EpisodeOutcome, ExplorationConfig, GoalRegistry, PlanChoice, ReplayRecord,
    ReplaySource,
};
pub use lm::{ChatRequest, ChatResponse, LanguageModel, LmError, LmRole};
pub use trajectory::{StepRecord, Trajectory};
pub use world::{GroundEvent, World, WorldError, WorldState};
