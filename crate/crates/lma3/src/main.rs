use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lma3::analysis::{self, AnalysisError};
use lma3::gateway::{
    BackendKind, Gateway, RemoteClient, RemoteConfig, ResponseCache, RetryPolicy, ENV_BACKEND,
};
use lma3::runner::{self, find_seed_dirs, RunConfig};
use lma3::scenario::load_world;
use lma3_core::agent::Condition;
use lma3_core::oracle::{replay_goal, Judge, ScriptedOracle};
use lma3_core::World;

#[derive(Parser)]
#[command(name = "lma3", version, about = "Language-model-augmented autotelic agent in a text kitchen")]
struct Cli {
    /// Scenario TOML; the built-in kitchen when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run or resume seeds of one condition.
    Run(RunArgs),
    /// Success rates on the 69 evaluation goals, optionally self-evaluation.
    Eval(EvalArgs),
    /// Oracle relabel sweep over archived trajectories.
    Finetune {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Diversity and uniqueness tables across conditions.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Episode spacing of the diversity time series.
        #[arg(long, default_value_t = 100)]
        every: u64,
    },
    /// Replay a stored goal, or check every replay record of a seed.
    Replay {
        seed_dir: PathBuf,
        #[arg(long)]
        goal: Option<String>,
    },
    /// Confusion matrix of judge verdicts against labels (id,label CSVs).
    Confusion {
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Remote,
    CacheReplay,
    Oracle,
}

impl From<Backend> for BackendKind {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Remote => BackendKind::Remote,
            Backend::CacheReplay => BackendKind::CacheReplay,
            Backend::Oracle => BackendKind::Oracle,
        }
    }
}

#[derive(Args)]
struct BackendArgs {
    /// Defaults to $LMA3_BACKEND, then the config file, then oracle.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Response cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    condition: Option<Condition>,
    /// `1..5`, `1,2,7` or a single seed.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<SeedList>,
    #[arg(long)]
    episodes: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    bootstrap: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    progress_every: Option<u64>,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// Also judge a sample of each seed's own goals.
    #[arg(long)]
    self_eval: bool,
    #[arg(long, value_enum, default_value = "oracle")]
    judge: JudgeKind,
    /// Chain-of-thought reward prompt for the LM judge.
    #[arg(long)]
    cot: bool,
    #[arg(long, default_value_t = 0)]
    sample_seed: u64,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum JudgeKind {
    Oracle,
    Lm,
}

#[derive(Clone, Debug)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    let bad = |_| format!("bad seed list `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(bad)?;
        let b: u64 = b.trim_start_matches('=').trim().parse().map_err(bad)?;
        if a > b {
            return Err(format!("empty seed range `{s}`"));
        }
        return Ok(SeedList((a..=b).collect()));
    }
    s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(SeedList)
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Run(#[from] runner::RunError),
    #[error(transparent)]
    Scenario(#[from] lma3::scenario::ScenarioFileError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad config file: {0}")]
    Config(#[from] toml::de::Error),
    #[error("{0}")]
    Other(String),
}

fn backend_kind(arg: Option<Backend>, fallback: BackendKind) -> Result<BackendKind, CliError> {
    if let Some(b) = arg {
        return Ok(b.into());
    }
    match std::env::var(ENV_BACKEND) {
        Ok(v) => v.parse().map_err(CliError::Other),
        Err(_) => Ok(fallback),
    }
}

fn make_gateway(world: &World, kind: BackendKind, cache: Option<&Path>) -> Result<Gateway, CliError> {
    let cache = cache.map(ResponseCache::open).transpose()?;
    Ok(match kind {
        BackendKind::Oracle => Gateway::oracle(ScriptedOracle::new(world.clone()), cache),
        BackendKind::CacheReplay => Gateway::replay(cache.unwrap_or_else(ResponseCache::in_memory)),
        BackendKind::Remote => {
            Gateway::remote(RemoteClient::new(RemoteConfig::from_env(), RetryPolicy::default()), cache)
        }
    })
}

fn seed_dirs(dirs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for d in dirs {
        out.extend(find_seed_dirs(d)?);
    }
    if out.is_empty() {
        return Err(CliError::Other("no seed directories found".into()));
    }
    Ok(out)
}

fn cmd_run(world: &World, args: RunArgs) -> Result<bool, CliError> {
    let mut config: RunConfig = match &args.config {
        Some(path) => toml::from_str(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.condition {
        config.condition = v;
    }
    if let Some(SeedList(v)) = args.seeds {
        config.seeds = v;
    }
    if let Some(v) = args.episodes {
        config.episodes = v;
    }
    if let Some(v) = args.out {
        config.output_dir = v;
    }
    if let Some(v) = args.epsilon {
        config.exploration.epsilon = v;
    }
    if let Some(v) = args.bootstrap {
        config.exploration.bootstrap_episodes = v;
    }
    if let Some(v) = args.snapshot_every {
        config.snapshot_every = v;
    }
    if let Some(v) = args.workers {
        config.workers = v;
    }
    if let Some(v) = args.progress_every {
        config.progress_every = v;
    }
    if let Some(v) = args.backend.model {
        config.exploration.model = v;
    }
    config.backend = backend_kind(args.backend.backend, config.backend)?;
    if let Some(v) = args.backend.cache {
        config.cache_path = Some(v);
    }
    if config.cache_path.is_none() && config.backend != BackendKind::Oracle {
        config.cache_path = Some(config.output_dir.join("lm_cache.jsonl"));
    }
    config.validate()?;

    let gateway = make_gateway(world, config.backend, config.cache_path.as_deref())?;
    let results = runner::run(world, &gateway, &config)?;
    let mut ok = true;
    for (seed, result) in config.seeds.iter().zip(results) {
        match result {
            Ok(s) => println!(
                "{} seed {seed}: {} episodes, {} goals, {} lm calls this invocation",
                config.condition, s.episodes, s.registry_size, s.lm_calls
            ),
            Err(e) => {
                ok = false;
                eprintln!("{} seed {seed} failed: {e}", config.condition);
            }
        }
    }
    let stats = gateway.stats();
    println!(
        "gateway: {} remote, {} cache hits, {} oracle",
        stats.remote_calls, stats.cache_hits, stats.oracle_calls
    );
    Ok(ok)
}

fn cmd_eval(world: &World, args: EvalArgs) -> Result<bool, CliError> {
    let dirs = seed_dirs(&args.dirs)?;
    let kind = backend_kind(args.backend.backend, BackendKind::Oracle)?;
    let gateway = make_gateway(world, kind, args.backend.cache.as_deref())?;
    let model = args.backend.model.unwrap_or_else(|| lma3_core::lm::DEFAULT_MODEL.to_string());
    println!("seed_dir,eval_success,self_eval_success,self_eval_goals");
    for dir in dirs {
        let report = analysis::eval_seed(world, &dir)?;
        let (self_rate, n) = if args.self_eval {
            let judge = match args.judge {
                JudgeKind::Oracle => Judge::Oracle,
                JudgeKind::Lm => Judge::Lm { lm: &gateway, model: &model, cot: args.cot },
            };
            let r = analysis::self_eval_seed(world, &dir, judge, args.sample_seed)?;
            (format!("{:.4}", r.rate()), r.outcomes.len().to_string())
        } else {
            (String::new(), String::new())
        };
        println!("{},{:.4},{self_rate},{n}", dir.display(), report.rate());
    }
    Ok(true)
}

fn run_cli(cli: Cli) -> Result<bool, CliError> {
    let world = match &cli.scenario {
        Some(path) => load_world(path)?,
        None => World::cooking_world(),
    };
    match cli.command {
        Command::Run(args) => cmd_run(&world, args),
        Command::Eval(args) => cmd_eval(&world, args),
        Command::Finetune { dirs } => {
            println!("seed_dir,before,after,goals_before,goals_after,trajectories");
            for dir in seed_dirs(&dirs)? {
                let s = analysis::finetune_seed(&world, &dir)?;
                println!(
                    "{},{:.4},{:.4},{},{},{}",
                    dir.display(),
                    s.before,
                    s.after,
                    s.goals_before,
                    s.goals_after,
                    s.trajectories
                );
            }
            Ok(true)
        }
        Command::Report { dirs, out, every } => {
            let report = analysis::report(&seed_dirs(&dirs)?, &out, every)?;
            print!("{}", analysis::format_summary(&report.summary));
            Ok(true)
        }
        Command::Replay { seed_dir, goal } => match goal {
            Some(goal) => {
                let registry = analysis::seed_registry(&seed_dir)?;
                let traj = replay_goal(&world, &registry, &goal)
                    .ok_or_else(|| CliError::Other(format!("goal `{goal}` is not in the registry")))?;
                for s in &traj.steps {
                    println!("Action {}: {}\nObservation {}: {}", s.step, s.action, s.step, s.observation);
                }
                Ok(true)
            }
            None => {
                let check = analysis::check_replays(&world, &seed_dir)?;
                println!("{} replay records, {} mismatches", check.records, check.mismatches.len());
                for (episode, goal) in &check.mismatches {
                    println!("mismatch: episode {episode} goal {goal}");
                }
                Ok(check.mismatches.is_empty())
            }
        },
        Command::Confusion { verdicts, labels } => {
            let m = analysis::confusion_from_files(&verdicts, &labels)?;
            println!("samples {} | positives {} | negatives {}", m.total(), m.positives(), m.negatives());
            println!(
                "TP {} FP {} TN {} FN {}",
                m.true_positive, m.false_positive, m.true_negative, m.false_negative
            );
            println!(
                "false positive rate {:.4} | false negative rate {:.4}",
                m.false_positive_rate(),
                m.false_negative_rate()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run_cli(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
