//! Multi-seed runs with per-seed logs, snapshots and resume.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use lma3_core::agent::{
    Agent, AgentError, AgentState, CallRecord, Condition, ExplorationConfig, PlanChoice, ReplayRecord,
};
use lma3_core::prompt::RewardVerdict;
use lma3_core::{GoalRegistry, LanguageModel, StepRecord, Trajectory, World};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gateway::BackendKind;

pub const TRAJECTORIES: &str = "trajectories.jsonl";
pub const REPLAY: &str = "replay.jsonl";
pub const CALLS: &str = "calls.jsonl";
pub const REGISTRY: &str = "registry.json";
pub const SNAPSHOT: &str = "snapshot.json";
pub const RUN_META: &str = "run.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("seed {seed}: {source}")]
    Agent { seed: u64, source: AgentError },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("snapshot is from seed {found}, expected {expected}")]
    SeedMismatch { expected: u64, found: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub condition: Condition,
    pub seeds: Vec<u64>,
    pub episodes: u64,
    pub backend: BackendKind,
    pub output_dir: PathBuf,
    pub cache_path: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub exploration: ExplorationConfig,
    pub snapshot_every: u64,
    pub workers: usize,
    /// Print a progress line every this many episodes; 0 is silent.
    pub progress_every: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            condition: Condition::Lma3,
            seeds: vec![1, 2, 3, 4, 5],
            episodes: 10_000,
            backend: BackendKind::Oracle,
            output_dir: PathBuf::from("runs"),
            cache_path: None,
            scenario: None,
            exploration: ExplorationConfig::default(),
            snapshot_every: 100,
            workers: 4,
            progress_every: 100,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        self.exploration.validate().map_err(|e| RunError::Config(e.to_string()))?;
        if self.seeds.is_empty() {
            return Err(RunError::Config("no seeds".into()));
        }
        if self.snapshot_every == 0 {
            return Err(RunError::Config("snapshot_every must be positive".into()));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(RunError::Config("duplicate seeds".into()));
        }
        Ok(())
    }

    pub fn condition_dir(&self) -> PathBuf {
        self.output_dir.join(self.condition.name())
    }

    pub fn seed_dir(&self, seed: u64) -> PathBuf {
        self.condition_dir().join(format!("seed-{seed}"))
    }
}

/// One line of `trajectories.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: u64,
    pub plan: PlanChoice,
    pub truncated_at: Option<usize>,
    pub steps: Vec<StepRecord>,
    pub relabels: Vec<(String, u32)>,
    pub verdicts: Vec<RewardVerdict>,
    pub new_goals: Vec<String>,
}

impl EpisodeLog {
    pub fn trajectory(&self) -> Trajectory {
        Trajectory { steps: self.steps.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub episodes: u64,
    pub registry_size: usize,
    pub lm_calls: u64,
    pub resumed_from: u64,
}

#[derive(Deserialize)]
struct EpisodeTag {
    episode: u64,
}

/// Drops lines whose `episode` field exceeds `max_episode`, and lines that
/// do not parse.
pub fn truncate_jsonl(path: &Path, max_episode: u64) -> io::Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let tmp = path.with_extension("jsonl.tmp");
    {
        let reader = BufReader::new(File::open(path)?);
        let mut out = BufWriter::new(File::create(&tmp)?);
        for line in reader.lines() {
            let line = line?;
            match serde_json::from_str::<EpisodeTag>(&line) {
                Ok(tag) if tag.episode <= max_episode => writeln!(out, "{line}")?,
                _ => {}
            }
        }
        out.flush()?;
    }
    fs::rename(tmp, path)
}

/// Parses every line of a JSONL file.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, RunError> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Streams `(episode, trajectory)` pairs from a seed directory.
pub fn archive(
    seed_dir: &Path,
) -> Result<impl Iterator<Item = Result<(u64, Trajectory), RunError>>, RunError> {
    let reader = BufReader::new(File::open(seed_dir.join(TRAJECTORIES))?);
    Ok(reader.lines().filter_map(|line| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(
            serde_json::from_str::<EpisodeLog>(&l)
                .map(|log| (log.episode, log.trajectory()))
                .map_err(Into::into),
        ),
    }))
}

pub fn load_registry(path: &Path) -> Result<GoalRegistry, RunError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pretty JSON written through a temporary file and a rename.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let tmp = path.with_extension("json.tmp");
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&tmp, text)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn appender(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?))
}

fn write_line<T: Serialize>(w: &mut impl Write, value: &T) -> Result<(), RunError> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
struct ReplayLine<'a> {
    #[serde(flatten)]
    record: &'a ReplayRecord,
    rewards: Vec<u8>,
}

/// Where a seed stops. `abort_after` ends the loop after that many episodes
/// of this invocation without a final snapshot, like a killed process.
#[derive(Clone, Copy, Debug, Default)]
pub struct StopRule {
    pub abort_after: Option<u64>,
}

/// Runs or resumes one seed.
pub fn run_seed(
    world: &World,
    lm: &dyn LanguageModel,
    config: &RunConfig,
    seed: u64,
    stop: StopRule,
) -> Result<SeedSummary, RunError> {
    let dir = config.seed_dir(seed);
    fs::create_dir_all(&dir)?;
    let snapshot_path = dir.join(SNAPSHOT);
    let mut state = if snapshot_path.exists() {
        let state: AgentState = serde_json::from_str(&fs::read_to_string(&snapshot_path)?)?;
        if state.seed != seed {
            return Err(RunError::SeedMismatch { expected: seed, found: state.seed });
        }
        state
    } else {
        AgentState::new(seed)
    };
    let resumed_from = state.episodes_done;
    for name in [TRAJECTORIES, REPLAY, CALLS] {
        truncate_jsonl(&dir.join(name), resumed_from)?;
    }

    let agent = Agent::new(world, lm, config.condition, config.exploration.clone())
        .map_err(|source| RunError::Agent { seed, source })?;
    let mut trajectories = appender(&dir.join(TRAJECTORIES))?;
    let mut replay = appender(&dir.join(REPLAY))?;
    let mut calls = appender(&dir.join(CALLS))?;
    let mut lm_calls = 0u64;
    let mut this_run = 0u64;

    let checkpoint = |state: &AgentState, writers: [&mut BufWriter<File>; 3]| -> Result<(), RunError> {
        for w in writers {
            w.flush()?;
            w.get_ref().sync_data()?;
        }
        write_json_atomic(&dir.join(REGISTRY), &state.registry)?;
        write_json_atomic(&snapshot_path, state)
    };

    while state.episodes_done < config.episodes {
        if stop.abort_after.is_some_and(|n| this_run >= n) {
            trajectories.flush()?;
            replay.flush()?;
            calls.flush()?;
            return Ok(SeedSummary {
                seed,
                episodes: state.episodes_done,
                registry_size: state.registry.len(),
                lm_calls,
                resumed_from,
            });
        }
        let outcome = agent.run_episode(&mut state).map_err(|source| RunError::Agent { seed, source })?;
        this_run += 1;
        lm_calls += outcome.calls.len() as u64;

        write_line(
            &mut trajectories,
            &EpisodeLog {
                episode: outcome.episode,
                plan: outcome.plan,
                truncated_at: outcome.truncated_at,
                steps: outcome.trajectory.steps,
                relabels: outcome.relabels,
                verdicts: outcome.verdicts,
                new_goals: outcome.new_goals,
            },
        )?;
        for record in &outcome.records {
            write_line(&mut replay, &ReplayLine { record, rewards: record.rewards() })?;
        }
        for call in &outcome.calls {
            write_line::<CallRecord>(&mut calls, call)?;
        }
        if config.progress_every > 0 && outcome.episode % config.progress_every == 0 {
            eprintln!(
                "[{} seed {seed}] episode {} registry {} lm calls {lm_calls}",
                config.condition,
                outcome.episode,
                state.registry.len()
            );
        }
        if outcome.episode % config.snapshot_every == 0 {
            checkpoint(&state, [&mut trajectories, &mut replay, &mut calls])?;
        }
    }
    checkpoint(&state, [&mut trajectories, &mut replay, &mut calls])?;
    Ok(SeedSummary {
        seed,
        episodes: state.episodes_done,
        registry_size: state.registry.len(),
        lm_calls,
        resumed_from,
    })
}

#[derive(Serialize, Deserialize)]
pub struct RunMeta {
    pub condition: Condition,
    pub backend: BackendKind,
    pub episodes: u64,
    pub exploration: ExplorationConfig,
}

/// Runs every seed on a bounded worker pool. Results come back in seed order.
pub fn run(
    world: &World,
    lm: &dyn LanguageModel,
    config: &RunConfig,
) -> Result<Vec<Result<SeedSummary, RunError>>, RunError> {
    config.validate()?;
    fs::create_dir_all(config.condition_dir())?;
    write_json_atomic(
        &config.condition_dir().join(RUN_META),
        &RunMeta {
            condition: config.condition,
            backend: config.backend,
            episodes: config.episodes,
            exploration: config.exploration.clone(),
        },
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| RunError::Config(e.to_string()))?;
    Ok(pool.install(|| {
        config.seeds.par_iter().map(|&seed| run_seed(world, lm, config, seed, StopRule::default())).collect()
    }))
}

/// Seed directories under `path`: the path itself if it holds a registry,
/// otherwise `seed-*` directories up to two levels down.
pub fn find_seed_dirs(path: &Path) -> io::Result<Vec<PathBuf>> {
    if path.join(REGISTRY).exists() || path.join(SNAPSHOT).exists() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    if !path.is_dir() {
        return Ok(out);
    }
    let mut children: Vec<PathBuf> =
        fs::read_dir(path)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    children.sort();
    for child in children {
        let is_seed = child.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("seed-"));
        if is_seed {
            out.push(child);
        } else {
            out.extend(find_seed_dirs(&child)?);
        }
    }
    Ok(out)
}
