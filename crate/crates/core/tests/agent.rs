use std::collections::BTreeSet;
use std::sync::Mutex;

use lma3_core::agent::{
    Agent, AgentError, CallRecord, Condition, ExplorationConfig, PlanChoice, ReplaySource,
};
use lma3_core::lm::{Backend, ChatRequest, ChatResponse, LanguageModel, LmError, LmRole};
use lma3_core::oracle::{eval_goals, ScriptedOracle};
use lma3_core::{AgentState, GoalRegistry, Trajectory, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Wraps a backend and keeps every request it sees.
struct Recording<L> {
    inner: L,
    requests: Mutex<Vec<ChatRequest>>,
}

impl<L> Recording<L> {
    fn new(inner: L) -> Self {
        Recording { inner, requests: Mutex::new(Vec::new()) }
    }

    fn prompts(&self, role: LmRole) -> Vec<String> {
        self.requests
            .lock()
            .unwrap()
            .iter()
            .filter(|r| r.purpose == Some(role))
            .map(|r| r.prompt().to_string())
            .collect()
    }
}

impl<L: LanguageModel> LanguageModel for Recording<L> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LmError> {
        self.requests.lock().unwrap().push(request.clone());
        self.inner.complete(request)
    }
}

/// Answers relabel and reward prompts with fixed text.
struct Canned {
    relabel: String,
    reward: String,
}

impl LanguageModel for Canned {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LmError> {
        let text = match request.purpose {
            Some(LmRole::Relabel) => self.relabel.clone(),
            Some(LmRole::Reward) => self.reward.clone(),
            _ => String::new(),
        };
        Ok(ChatResponse::new(text, Backend::Oracle))
    }
}

struct Failing;

impl LanguageModel for Failing {
    fn complete(&self, _: &ChatRequest) -> Result<ChatResponse, LmError> {
        Err(LmError::Transport("connection refused".into()))
    }
}

fn seq(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn config(bootstrap: u64) -> ExplorationConfig {
    ExplorationConfig { bootstrap_episodes: bootstrap, ..ExplorationConfig::default() }
}

fn fridge_trajectory(world: &World) -> Trajectory {
    let actions = ["move south", "pick up the red potato", "open the fridge", "pick up the parsley"];
    Trajectory::rollout(world, &actions).unwrap().0
}

#[test]
fn first_episode_is_random() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let agent = Agent::new(&world, &lm, Condition::Lma3, config(4000)).unwrap();
    let mut registry = GoalRegistry::new();
    registry.record("open the fridge", &seq(&["move south", "open the fridge"]), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut calls = Vec::new();
    let plan = agent.select_plan(1, &registry, None, &mut rng, &mut calls).unwrap();
    assert_eq!(plan, PlanChoice::Random);
    let plan = agent.select_plan(7, &GoalRegistry::new(), None, &mut rng, &mut calls).unwrap();
    assert_eq!(plan, PlanChoice::Random);
    assert!(calls.is_empty());
}

#[test]
fn bootstrap_is_uniform_over_registry() {
    let world = World::cooking_world();
    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    let agent = Agent::new(&world, &lm, Condition::Lma3, config(4000)).unwrap();
    let mut registry = GoalRegistry::new();
    registry.record("g1", &seq(&["move south"]), 1);
    registry.record("g2", &seq(&["move south", "open the fridge"]), 1);
    let mut first = 0;
    let n = 20_000;
    let mut calls = Vec::new();
    for s in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        match agent.select_plan(4000, &registry, None, &mut rng, &mut calls).unwrap() {
            PlanChoice::Bootstrap { goal } if goal == "g1" => first += 1,
            PlanChoice::Bootstrap { goal } => assert_eq!(goal, "g2"),
            other => panic!("{other:?}"),
        }
    }
    assert!((first as f64 / n as f64 - 0.5).abs() < 0.015);
    assert!(lm.requests.lock().unwrap().is_empty());
}

#[test]
fn goal_generator_gets_sixty_instructions() {
    let world = World::cooking_world();
    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    let agent = Agent::new(&world, &lm, Condition::Lma3, config(4000)).unwrap();
    let mut registry = GoalRegistry::new();
    for i in 0..100 {
        registry.record(&format!("goal number {i}"), &seq(&["move south"]), 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut calls: Vec<CallRecord> = Vec::new();
    let last = fridge_trajectory(&world);
    let plan = agent.select_plan(4001, &registry, Some(&last), &mut rng, &mut calls).unwrap();
    let prompts = lm.prompts(LmRole::Goalgen);
    assert_eq!(prompts.len(), 1);
    let tail = &prompts[0][prompts[0].rfind("Example 3:").unwrap()..];
    let numbered: Vec<&str> = tail.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(numbered.len(), 60);
    assert!(tail.contains("#60 goal number"));
    assert_eq!(calls.len(), 1);
    assert_eq!(calls[0].items, 60);
    match plan {
        PlanChoice::Generated { plan } => {
            assert!((2..=4).contains(&plan.subgoals.len()));
            for s in &plan.subgoals {
                assert!(registry.contains(&s.text));
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unparsable_plan_falls_back_to_bootstrap() {
    let world = World::cooking_world();
    let lm = Canned { relabel: String::new(), reward: String::new() };
    let agent = Agent::new(&world, &lm, Condition::Lma3, config(10)).unwrap();
    let mut registry = GoalRegistry::new();
    registry.record("g1", &seq(&["move south"]), 1);
    registry.record("g2", &seq(&["move south"]), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut calls = Vec::new();
    let plan = agent.select_plan(11, &registry, None, &mut rng, &mut calls).unwrap();
    assert!(matches!(plan, PlanChoice::Bootstrap { .. }));
    assert_eq!(calls.len(), 1);
}

#[test]
fn verified_relabel_enters_registry() {
    let world = World::cooking_world();
    let lm = Canned {
        relabel: "- open the fridge (step 3).\n- grab a potato (step 2).".into(),
        reward: "- open the fridge. Answer: yes (step 3).\n- grab a potato. Answer: no.".into(),
    };
    let agent = Agent::new(&world, &lm, Condition::NoTips, config(4000)).unwrap();
    let traj = fridge_trajectory(&world);
    let mut registry = GoalRegistry::new();
    let mut calls = Vec::new();
    let (relabels, verdicts, records, new_goals) =
        agent.process_episode(2, &traj, &PlanChoice::Random, &mut registry, &mut calls).unwrap();
    assert_eq!(relabels, vec![("open the fridge".into(), 3), ("grab a potato".into(), 2)]);
    assert_eq!(verdicts.len(), 2);
    assert_eq!(new_goals, vec!["open the fridge".to_string()]);
    let entry = registry.get("open the fridge").unwrap();
    assert_eq!(entry.actions, seq(&["move south", "pick up the red potato", "open the fridge"]));
    assert_eq!(entry.first_episode, 2);
    assert!(!registry.contains("grab a potato"));
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].source, ReplaySource::Relabel);
    assert_eq!(records[0].rewards(), vec![0, 0, 1]);
    assert_eq!(calls.len(), 2);
}

#[test]
fn rejected_relabel_changes_nothing() {
    let world = World::cooking_world();
    let lm = Canned {
        relabel: "- open the fridge (step 3).".into(),
        reward: "- open the fridge. Answer: no.".into(),
    };
    let agent = Agent::new(&world, &lm, Condition::NoTips, config(4000)).unwrap();
    let mut registry = GoalRegistry::new();
    let before = registry.clone();
    let (_, _, records, _) = agent
        .process_episode(2, &fridge_trajectory(&world), &PlanChoice::Random, &mut registry, &mut calls_vec())
        .unwrap();
    assert!(records.is_empty());
    assert_eq!(registry, before);
}

fn calls_vec() -> Vec<CallRecord> {
    Vec::new()
}

#[test]
fn shorter_completion_replaces_sequence() {
    let world = World::cooking_world();
    let lm = Canned {
        relabel: "- open the fridge (step 3).".into(),
        reward: "- open the fridge. Answer: yes (step 3).".into(),
    };
    let agent = Agent::new(&world, &lm, Condition::NoTips, config(4000)).unwrap();
    let mut registry = GoalRegistry::new();
    let five = seq(&["move south", "move north", "move south", "pick up the red potato", "open the fridge"]);
    registry.record("open the fridge", &five, 1);
    agent
        .process_episode(9, &fridge_trajectory(&world), &PlanChoice::Random, &mut registry, &mut calls_vec())
        .unwrap();
    let entry = registry.get("open the fridge").unwrap();
    assert_eq!(entry.actions.len(), 3);
    assert_eq!(entry.first_episode, 1);
    assert_eq!(entry.achieved_count, 2);

    let lm_long = Canned {
        relabel: "- open the fridge (step 4).".into(),
        reward: "- open the fridge. Answer: yes (step 4).".into(),
    };
    let agent = Agent::new(&world, &lm_long, Condition::NoTips, config(4000)).unwrap();
    agent
        .process_episode(10, &fridge_trajectory(&world), &PlanChoice::Random, &mut registry, &mut calls_vec())
        .unwrap();
    assert_eq!(registry.get("open the fridge").unwrap().actions.len(), 3);
}

#[test]
fn out_of_range_steps_are_ignored() {
    let world = World::cooking_world();
    let lm = Canned {
        relabel: "- open the fridge (step 3).".into(),
        reward: "- open the fridge. Answer: yes (step 30).".into(),
    };
    let agent = Agent::new(&world, &lm, Condition::NoTips, config(4000)).unwrap();
    let mut registry = GoalRegistry::new();
    let (_, _, records, _) = agent
        .process_episode(2, &fridge_trajectory(&world), &PlanChoice::Random, &mut registry, &mut calls_vec())
        .unwrap();
    assert!(records.is_empty());
    assert!(registry.is_empty());
}

#[test]
fn subgoal_verdicts_only_bump_counts() {
    let world = World::cooking_world();
    let lm = Canned {
        relabel: String::new(),
        reward: "- open the fridge, then pick up the parsley. Answer: yes (step 4).\n- open the fridge. Answer: yes (step 3).\n- pick up the parsley. Answer: yes (step 4).".into(),
    };
    let agent = Agent::new(&world, &lm, Condition::NoTips, config(1)).unwrap();
    let mut registry = GoalRegistry::new();
    registry.record("open the fridge", &seq(&["move south", "open the fridge"]), 1);
    registry.record(
        "pick up the parsley",
        &seq(&["move south", "open the fridge", "pick up the parsley"]),
        1,
    );
    let plan = PlanChoice::Generated {
        plan: lma3_core::prompt::EpisodePlan {
            main_goal: "open the fridge, then pick up the parsley".into(),
            subgoals: vec![
                lma3_core::prompt::Subgoal { index: 1, text: "open the fridge".into() },
                lma3_core::prompt::Subgoal { index: 2, text: "pick up the parsley".into() },
            ],
        },
    };
    let (_, _, records, new_goals) =
        agent.process_episode(5, &fridge_trajectory(&world), &plan, &mut registry, &mut calls_vec()).unwrap();
    assert_eq!(new_goals, vec!["open the fridge, then pick up the parsley".to_string()]);
    let sources: Vec<ReplaySource> = records.iter().map(|r| r.source).collect();
    assert_eq!(sources, vec![ReplaySource::MainGoal, ReplaySource::Subgoal, ReplaySource::Subgoal]);
    assert_eq!(registry.get("open the fridge").unwrap().actions.len(), 2);
    assert_eq!(registry.get("open the fridge").unwrap().achieved_count, 2);
}

#[test]
fn failed_call_leaves_state_untouched() {
    let world = World::cooking_world();
    let agent = Agent::new(&world, &Failing, Condition::Lma3, config(4000)).unwrap();
    let mut state = AgentState::new(3);
    let before = state.clone();
    let err = agent.run_episode(&mut state).unwrap_err();
    assert!(matches!(err, AgentError::Lm(LmError::Transport(_))));
    assert_eq!(state, before);
}

#[test]
fn invalid_config_rejected() {
    let world = World::cooking_world();
    let bad = ExplorationConfig { epsilon: 1.5, ..ExplorationConfig::default() };
    assert!(Agent::new(&world, &Failing, Condition::Lma3, bad).is_err());
}

fn run(
    world: &World,
    lm: &dyn LanguageModel,
    condition: Condition,
    seed: u64,
    episodes: u64,
    bootstrap: u64,
) -> (AgentState, Vec<lma3_core::EpisodeOutcome>) {
    let agent = Agent::new(world, lm, condition, config(bootstrap)).unwrap();
    let mut state = AgentState::new(seed);
    let outcomes = (0..episodes).map(|_| agent.run_episode(&mut state).unwrap()).collect();
    (state, outcomes)
}

#[test]
fn runs_are_deterministic() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let (a, oa) = run(&world, &lm, Condition::Lma3, 7, 150, 50);
    let (b, ob) = run(&world, &lm, Condition::Lma3, 7, 150, 50);
    assert_eq!(a, b);
    assert_eq!(oa, ob);
    let (c, _) = run(&world, &lm, Condition::Lma3, 8, 150, 50);
    assert_ne!(a.registry, c.registry);
}

#[test]
fn schedule_monotonicity_and_replay_soundness() {
    let world = World::cooking_world();
    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    let agent = Agent::new(&world, &lm, Condition::Lma3, config(100)).unwrap();
    let mut state = AgentState::new(1);
    let mut generated = 0;
    for _ in 0..250 {
        let before = state.registry.clone();
        let out = agent.run_episode(&mut state).unwrap();
        let goalgen_calls = out.calls.iter().filter(|c| c.role == LmRole::Goalgen).count();
        if out.episode <= 100 {
            assert_eq!(goalgen_calls, 0, "episode {}", out.episode);
        } else {
            generated += goalgen_calls;
        }
        if out.episode == 1 {
            assert_eq!(out.plan, PlanChoice::Random);
        }
        for c in &out.calls {
            if c.role == LmRole::Relabel {
                assert!(c.items <= 10);
            }
        }
        assert!(out.relabels.len() <= 10);
        for (goal, entry) in &before.goals {
            let now = state.registry.goals.get(goal).expect("registry lost a goal");
            assert!(now.actions.len() <= entry.actions.len());
        }
        let verified: BTreeSet<String> =
            out.verdicts.iter().filter(|v| v.achieved).map(|v| v.goal.clone()).collect();
        for g in state.registry.keys() {
            if !before.contains(g) {
                assert!(verified.contains(g), "{g} registered without a yes");
            }
        }
        for r in &out.records {
            let (replayed, _) = Trajectory::rollout(&world, &r.actions).unwrap();
            assert_eq!(replayed.steps[..], out.trajectory.steps[..r.actions.len()]);
            assert_eq!(r.actions.len() as u32, r.completion_step);
            assert_eq!(*r.rewards().last().unwrap(), 1);
        }
    }
    assert!(generated > 0);
    assert_eq!(lm.prompts(LmRole::Goalgen).len(), generated);
}

#[test]
fn conditions_are_distinct() {
    let flags: BTreeSet<String> = Condition::ALL.iter().map(|c| format!("{:?}", c.flags())).collect();
    assert_eq!(flags.len(), 5);
    for c in Condition::ALL {
        assert_eq!(c.name().parse::<Condition>().unwrap(), c);
        let f = c.flags();
        assert!(!f.human_tips || f.cot);
    }
    assert!("lma4".parse::<Condition>().is_err());
}

#[test]
fn no_cot_condition_prompts_have_no_reasoning_cue() {
    let world = World::cooking_world();
    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    run(&world, &lm, Condition::NoCotNoTips, 2, 60, 20);
    let requests = lm.requests.lock().unwrap();
    assert!(requests.iter().any(|r| r.purpose == Some(LmRole::Goalgen)));
    for r in requests.iter() {
        assert!(!r.prompt().contains("Let's think step by step"));
    }
    drop(requests);

    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    run(&world, &lm, Condition::Lma3, 2, 5, 20);
    let relabel = lm.prompts(LmRole::Relabel);
    assert!(relabel.iter().all(|p| p.contains("use the oven for the second time (step 55).")));
}

#[test]
fn temperatures_follow_roles() {
    let world = World::cooking_world();
    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    run(&world, &lm, Condition::Lma3, 3, 40, 10);
    for r in lm.requests.lock().unwrap().iter() {
        let want = if r.purpose == Some(LmRole::Reward) { 0.0 } else { 0.9 };
        assert_eq!(r.temperature, want);
    }
}

#[test]
fn no_goalgen_condition_never_generates() {
    let world = World::cooking_world();
    let lm = Recording::new(ScriptedOracle::new(world.clone()));
    run(&world, &lm, Condition::NoGoalgenNoTips, 4, 80, 10);
    assert!(lm.prompts(LmRole::Goalgen).is_empty());
    assert!(!lm.prompts(LmRole::Relabel).is_empty());
}

#[test]
fn oracle_baseline_learns_only_eval_goals() {
    let world = World::cooking_world();
    let lm = Recording::new(Failing);
    let (state, _) = run(&world, &lm, Condition::OracleBaseline, 5, 200, 4000);
    assert!(lm.requests.lock().unwrap().is_empty());
    assert!(!state.registry.is_empty());
    let eval: BTreeSet<String> = eval_goals(&world).iter().map(|g| g.canonical()).collect();
    assert!(state.registry.keys().all(|k| eval.contains(k)));
}
