//! Std companion of `lma3-core`: the LM gateway (remote endpoint, response
//! cache, scripted oracle), scenario files, the multi-seed runner with
//! resumable logs, and the post-run analyses behind the `lma3` command.

pub mod analysis;
pub mod gateway;
pub mod runner;
pub mod scenario;
pub mod stem;

pub use gateway::{BackendKind, Gateway, RemoteClient, RemoteConfig, ResponseCache, RetryPolicy};
pub use runner::{run, run_seed, RunConfig, RunError, SeedSummary, StopRule};
