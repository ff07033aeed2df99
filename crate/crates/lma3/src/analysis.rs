//! Post-run commands: success evaluation, the oracle finetune sweep,
//! diversity reports and replay checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use lma3_core::agent::GoalRegistry;
use lma3_core::metrics::{unique_goals, DiversityReport, Embedder, TrigramEmbedder};
use lma3_core::oracle::{
    confusion, eval_goals, evaluate_success, finetune_trajectory, self_evaluate, ConfusionMatrix, Judge,
    SuccessReport,
};
use lma3_core::{Trajectory, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::runner::{
    archive, load_registry, read_jsonl, write_json_atomic, EpisodeLog, RunError, RunMeta, REGISTRY, REPLAY,
    RUN_META, TRAJECTORIES,
};
use crate::stem::EnglishStemmer;

pub const SUCCESS_REPORT: &str = "success_report.csv";
pub const SELF_EVAL_REPORT: &str = "self_eval_report.csv";
pub const FINETUNED_REGISTRY: &str = "registry_finetuned.json";
pub const FINETUNE_SUMMARY: &str = "finetune.json";
pub const DIVERSITY_TIMESERIES: &str = "diversity_timeseries.csv";
pub const UNIQUENESS: &str = "uniqueness.csv";
pub const REPORT: &str = "report.csv";

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("missing artifact {0}")]
    Missing(PathBuf),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("lm error: {0}")]
    Lm(#[from] lma3_core::LmError),
}

fn require(path: PathBuf) -> Result<PathBuf, AnalysisError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(AnalysisError::Missing(path))
    }
}

pub fn seed_registry(seed_dir: &Path) -> Result<GoalRegistry, AnalysisError> {
    Ok(load_registry(&require(seed_dir.join(REGISTRY))?)?)
}

#[derive(Serialize)]
struct SuccessRow<'a> {
    goal: &'a str,
    achieved: bool,
    step: Option<u32>,
    sequence_length: Option<usize>,
}

pub fn write_success_csv(path: &Path, report: &SuccessReport) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_path(path)?;
    for o in &report.outcomes {
        w.serialize(SuccessRow {
            goal: &o.goal,
            achieved: o.achieved,
            step: o.step,
            sequence_length: o.sequence_len,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Oracle success on the evaluation goals; writes `success_report.csv`.
pub fn eval_seed(world: &World, seed_dir: &Path) -> Result<SuccessReport, AnalysisError> {
    let registry = seed_registry(seed_dir)?;
    let report = evaluate_success(world, &registry, &eval_goals(world));
    write_success_csv(&seed_dir.join(SUCCESS_REPORT), &report)?;
    Ok(report)
}

/// Judges up to 200 of the seed's own goals; writes `self_eval_report.csv`.
pub fn self_eval_seed(
    world: &World,
    seed_dir: &Path,
    judge: Judge<'_>,
    sample_seed: u64,
) -> Result<SuccessReport, AnalysisError> {
    let registry = seed_registry(seed_dir)?;
    let goals: Vec<&str> = registry.keys().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let report = self_evaluate(world, &registry, &goals, judge, &mut rng)?;
    write_success_csv(&seed_dir.join(SELF_EVAL_REPORT), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinetuneSummary {
    pub before: f64,
    pub after: f64,
    pub goals_before: usize,
    pub goals_after: usize,
    pub trajectories: u64,
}

/// Sweeps the archived trajectories with the oracle relabeler. Writes the
/// finetuned registry next to the original, which is left untouched.
pub fn finetune_seed(world: &World, seed_dir: &Path) -> Result<FinetuneSummary, AnalysisError> {
    let registry = seed_registry(seed_dir)?;
    require(seed_dir.join(TRAJECTORIES))?;
    let goals = eval_goals(world);
    let mut tuned = registry.clone();
    let mut trajectories = 0;
    for item in archive(seed_dir)? {
        let (episode, traj) = item?;
        finetune_trajectory(&goals, episode, &traj, &mut tuned);
        trajectories += 1;
    }
    let summary = FinetuneSummary {
        before: evaluate_success(world, &registry, &goals).rate(),
        after: evaluate_success(world, &tuned, &goals).rate(),
        goals_before: registry.len(),
        goals_after: tuned.len(),
        trajectories,
    };
    write_json_atomic(&seed_dir.join(FINETUNED_REGISTRY), &tuned)?;
    write_json_atomic(&seed_dir.join(FINETUNE_SUMMARY), &summary)?;
    Ok(summary)
}

/// Condition label of a seed directory: from `run.json` one level up, else
/// the parent directory name.
pub fn condition_label(seed_dir: &Path) -> String {
    let parent = seed_dir.parent();
    parent
        .map(|p| p.join(RUN_META))
        .and_then(|p| fs::read_to_string(p).ok())
        .and_then(|t| serde_json::from_str::<RunMeta>(&t).ok())
        .map(|m| m.condition.name().to_string())
        .or_else(|| parent.and_then(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "run".into())
}

pub fn seed_label(seed_dir: &Path) -> String {
    seed_dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeseriesRow {
    pub episode: u64,
    pub n_goals: usize,
    pub d0: f64,
    pub d1: f64,
    pub h_index: usize,
    pub conjunction_ratio: f64,
    pub category_ratio: f64,
}

/// Diversity of the goals discovered by each checkpoint episode.
pub fn diversity_timeseries(registry: &GoalRegistry, every: u64) -> Vec<TimeseriesRow> {
    let stemmer = EnglishStemmer::default();
    let last = registry.goals.values().map(|e| e.first_episode).max().unwrap_or(0);
    let every = every.max(1);
    let mut checkpoints: Vec<u64> = (1..=last / every).map(|k| k * every).collect();
    if checkpoints.last() != Some(&last) && last > 0 {
        checkpoints.push(last);
    }
    checkpoints
        .into_iter()
        .map(|episode| {
            let goals: Vec<&str> = registry
                .goals
                .iter()
                .filter(|(_, e)| e.first_episode <= episode)
                .map(|(g, _)| g.as_str())
                .collect();
            let r = DiversityReport::compute(&goals, &stemmer);
            TimeseriesRow {
                episode,
                n_goals: r.n_goals,
                d0: r.d0,
                d1: r.d1,
                h_index: r.h_index,
                conjunction_ratio: r.conjunction_ratio,
                category_ratio: r.category_ratio,
            }
        })
        .collect()
}

/// Per-seed metrics row of the cross-condition report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub condition: String,
    pub seed: String,
    pub n_goals: usize,
    pub d0: f64,
    pub d1: f64,
    pub h_index: usize,
    pub conjunction_ratio: f64,
    pub category_ratio: f64,
    pub unique_goals: usize,
    pub unique_ratio: f64,
    pub unique_novelty: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub condition: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub seeds: usize,
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean distance from each of `goals` to its nearest other entry of
/// `corpus`. Entries equal to the goal count once as the goal itself.
fn mean_novelty(goals: &BTreeSet<String>, corpus: &[String], embedder: &TrigramEmbedder) -> f64 {
    if goals.is_empty() || corpus.len() < 2 {
        return 0.0;
    }
    let vectors: Vec<Vec<f64>> = corpus.par_iter().map(|c| embedder.embed(c)).collect();
    let total: f64 = goals
        .par_iter()
        .map(|g| {
            let own = corpus.iter().position(|c| c == g);
            let v = embedder.embed(g);
            vectors
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != own)
                .map(|(_, c)| {
                    let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                    (1.0 - dot).max(0.0)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / goals.len() as f64
}

type Metric = fn(&SeedMetrics) -> f64;

pub struct Report {
    pub seeds: Vec<SeedMetrics>,
    pub summary: Vec<SummaryRow>,
}

/// Computes the report over all seed directories, writing
/// `diversity_timeseries.csv` and `uniqueness.csv` into each seed directory
/// and `report.csv` into `out`.
pub fn report(seed_dirs: &[PathBuf], out: &Path, every: u64) -> Result<Report, AnalysisError> {
    let stemmer = EnglishStemmer::default();
    let embedder = TrigramEmbedder::default();
    let mut registries = Vec::new();
    for dir in seed_dirs {
        registries.push((condition_label(dir), seed_label(dir), dir.clone(), seed_registry(dir)?));
    }
    let sets: BTreeMap<(String, String), BTreeSet<String>> = registries
        .iter()
        .map(|(c, s, _, r)| ((c.clone(), s.clone()), r.keys().map(String::from).collect()))
        .collect();
    let unique = unique_goals(&sets);
    let corpus: Vec<String> = sets.values().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();

    let mut seeds = Vec::new();
    for (condition, seed, dir, registry) in &registries {
        let mut w = csv::Writer::from_path(dir.join(DIVERSITY_TIMESERIES))?;
        for row in diversity_timeseries(registry, every) {
            w.serialize(row)?;
        }
        w.flush()?;

        let goals: Vec<&str> = registry.keys().collect();
        let d = DiversityReport::compute(&goals, &stemmer);
        let u = &unique[&(condition.clone(), seed.clone())];
        let novelty = mean_novelty(&u.unique, &corpus, &embedder);
        let mut w = csv::Writer::from_path(dir.join(UNIQUENESS))?;
        w.write_record(["goal"])?;
        for g in &u.unique {
            w.write_record([g])?;
        }
        w.flush()?;
        seeds.push(SeedMetrics {
            condition: condition.clone(),
            seed: seed.clone(),
            n_goals: d.n_goals,
            d0: d.d0,
            d1: d.d1,
            h_index: d.h_index,
            conjunction_ratio: d.conjunction_ratio,
            category_ratio: d.category_ratio,
            unique_goals: u.unique.len(),
            unique_ratio: u.ratio,
            unique_novelty: novelty,
        });
    }

    let mut by_condition: BTreeMap<&str, Vec<&SeedMetrics>> = BTreeMap::new();
    for m in &seeds {
        by_condition.entry(&m.condition).or_default().push(m);
    }
    let metrics: [(&str, Metric); 9] = [
        ("n_goals", |m| m.n_goals as f64),
        ("d0", |m| m.d0),
        ("d1", |m| m.d1),
        ("h_index", |m| m.h_index as f64),
        ("conjunction_ratio", |m| m.conjunction_ratio),
        ("category_ratio", |m| m.category_ratio),
        ("unique_goals", |m| m.unique_goals as f64),
        ("unique_ratio", |m| m.unique_ratio),
        ("unique_novelty", |m| m.unique_novelty),
    ];
    let mut summary = Vec::new();
    for (condition, rows) in &by_condition {
        for (name, get) in metrics {
            let values: Vec<f64> = rows.iter().map(|m| get(m)).collect();
            let (mean, std) = mean_std(&values);
            summary.push(SummaryRow {
                condition: condition.to_string(),
                metric: name.into(),
                mean,
                std,
                seeds: rows.len(),
            });
        }
    }
    fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join(REPORT))?;
    for row in &summary {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(Report { seeds, summary })
}

/// Plain-text table of a summary.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = format!("{:<20} {:<18} {:>14} {:>12}\n", "condition", "metric", "mean", "std");
    for r in rows {
        out.push_str(&format!("{:<20} {:<18} {:>14.4} {:>12.4}\n", r.condition, r.metric, r.mean, r.std));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayCheck {
    pub records: usize,
    pub mismatches: Vec<(u64, String)>,
}

#[derive(Deserialize)]
struct ReplayLine {
    goal: String,
    episode: u64,
    completion_step: u32,
    actions: Vec<String>,
}

/// Replays every record of `replay.jsonl` from reset and compares the
/// observations with the logged episode.
pub fn check_replays(world: &World, seed_dir: &Path) -> Result<ReplayCheck, AnalysisError> {
    let logs: Vec<EpisodeLog> = read_jsonl(&require(seed_dir.join(TRAJECTORIES))?)?;
    let by_episode: BTreeMap<u64, &EpisodeLog> = logs.iter().map(|l| (l.episode, l)).collect();
    let records: Vec<ReplayLine> = read_jsonl(&require(seed_dir.join(REPLAY))?)?;
    let mut check = ReplayCheck { records: records.len(), mismatches: Vec::new() };
    for r in &records {
        let ok = by_episode.get(&r.episode).is_some_and(|log| {
            let n = r.completion_step as usize;
            match Trajectory::rollout(world, &r.actions) {
                Ok((t, _)) => {
                    t.len() == n
                        && log.steps.len() >= n
                        && t.steps.iter().zip(&log.steps).all(|(a, b)| a == b)
                }
                Err(_) => false,
            }
        });
        if !ok {
            check.mismatches.push((r.episode, r.goal.clone()));
        }
    }
    Ok(check)
}

/// Reads a two-column `trajectory-id,label` CSV. A header row is skipped
/// when its label does not parse; labels are 1/0, true/false or yes/no.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, bool>, AnalysisError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut out = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let (Some(id), Some(label)) = (record.get(0), record.get(1)) else {
            continue;
        };
        match parse_label(label) {
            Some(v) => {
                out.insert(id.to_string(), v);
            }
            None if i == 0 => {}
            None => {
                return Err(AnalysisError::Io(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{}: bad label `{label}` for `{id}`", path.display()),
                )))
            }
        }
    }
    Ok(out)
}

fn parse_label(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Confusion matrix of judge verdicts against truth labels, joined on
/// trajectory id. Ids missing from either side are reported as an error.
pub fn confusion_from_files(verdicts: &Path, labels: &Path) -> Result<ConfusionMatrix, AnalysisError> {
    let v = read_labels(verdicts)?;
    let l = read_labels(labels)?;
    let ids: BTreeSet<&String> = v.keys().chain(l.keys()).collect();
    let mut vs = Vec::new();
    let mut ls = Vec::new();
    for id in ids {
        match (v.get(id), l.get(id)) {
            (Some(&a), Some(&b)) => {
                vs.push(a);
                ls.push(b);
            }
            _ => {
                return Err(AnalysisError::Io(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("trajectory `{id}` is not in both files"),
                )))
            }
        }
    }
    confusion(&vs, &ls)
        .map_err(|e| AnalysisError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string())))
}
