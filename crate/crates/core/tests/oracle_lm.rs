use lma3_core::lm::{ChatRequest, LanguageModel, LmRole};
use lma3_core::oracle::{
    confusion, eval_goals, evaluate_success, oracle_finetune, self_evaluate, Judge, ScriptedOracle,
    RECIPE_GOAL, SELF_EVAL_SAMPLE,
};
use lma3_core::prompt::{
    answer_text, parse_goalgen_response, parse_relabel_response, parse_reward_response,
    render_goalgen_prompt, render_relabel_prompt, render_reward_prompt, PromptVariant,
};
use lma3_core::{GoalRegistry, Trajectory, World};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ask(lm: &ScriptedOracle, role: LmRole, prompt: String) -> String {
    let request = ChatRequest::for_role(role, "oracle", prompt);
    let response = lm.complete(&request).unwrap();
    answer_text(request.prompt(), &response.content)
}

fn slice_trajectory(world: &World) -> Trajectory {
    let actions = [
        "move south",
        "open the kitchen cupboard",
        "pick up the knife",
        "open the fridge",
        "close the fridge",
        "pick up the red potato",
        "slice the red potato",
    ];
    Trajectory::rollout(world, &actions).unwrap().0
}

#[test]
fn relabels_the_slice() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let traj = slice_trajectory(&world);
    for v in PromptVariant::all().into_iter().filter(|v| v.role == LmRole::Relabel) {
        let answer = ask(&lm, LmRole::Relabel, render_relabel_prompt(&traj, v).unwrap());
        assert!(answer.contains("- slice the red potato (step 7)."), "{answer}");
        let parsed = parse_relabel_response(&answer);
        assert!(parsed.entries.contains(&("slice the red potato".to_string(), 7)));
        assert!(parsed.entries.contains(&("open the fridge".to_string(), 4)));
    }
}

#[test]
fn reward_answers() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let actions = ["move south", "pick up the red potato", "open the fridge"];
    let traj = Trajectory::rollout(&world, &actions).unwrap().0;
    let answer = ask(&lm, LmRole::Reward, render_reward_prompt(&traj, &["open the fridge"], false).unwrap());
    assert_eq!(answer.trim_end(), "- open the fridge. Answer: yes (step 3).");
    let answer = ask(&lm, LmRole::Reward, render_reward_prompt(&traj, &["cook an omelet"], false).unwrap());
    assert!(answer.trim_end().ends_with("Answer: no."));

    let goals = ["cook an omelet", "open the fridge"];
    let answer = ask(&lm, LmRole::Reward, render_reward_prompt(&traj, &goals, true).unwrap());
    let verdicts = parse_reward_response(&answer, &goals);
    assert_eq!((verdicts[0].achieved, verdicts[1].step), (false, Some(3)));
}

#[test]
fn goalgen_references_given_instructions() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let traj = slice_trajectory(&world);
    let instructions =
        ["move south", "open the fridge", "pick up the knife", "slice the red potato", "eat the meal"];
    for cot in [false, true] {
        let answer = ask(&lm, LmRole::Goalgen, render_goalgen_prompt(&traj, &instructions, cot).unwrap());
        let plan = parse_goalgen_response(&answer, &instructions).unwrap();
        assert!((2..=4).contains(&plan.subgoals.len()));
        assert!(plan.indices().iter().all(|i| (1..=5).contains(i)));
        assert!(!plan.main_goal.is_empty());
    }
}

#[test]
fn oracle_is_a_pure_function_of_the_prompt() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let traj = slice_trajectory(&world);
    let v = PromptVariant::new(LmRole::Relabel, true, true).unwrap();
    let prompt = render_relabel_prompt(&traj, v).unwrap();
    assert_eq!(ask(&lm, LmRole::Relabel, prompt.clone()), ask(&lm, LmRole::Relabel, prompt));
    assert!(lm.complete(&ChatRequest::for_role(LmRole::Reward, "oracle", "hello".into())).is_err());
}

#[test]
fn finetune_is_idempotent_and_pure() {
    let world = World::cooking_world();
    let goals = eval_goals(&world);
    let recipe = [
        "move south",
        "read the cookbook",
        "open the fridge",
        "pick up the cilantro",
        "pick up the parsley",
        "open the kitchen cupboard",
        "pick up the knife",
        "slice the parsley",
        "prepare the meal",
        "eat the meal",
    ];
    let archive = [(1, Trajectory::rollout(&world, &recipe).unwrap().0), (2, slice_trajectory(&world))];
    let empty = GoalRegistry::new();
    assert_eq!(evaluate_success(&world, &empty, &goals).rate(), 0.0);
    let once = oracle_finetune(&goals, archive.iter().map(|(e, t)| (*e, t)), &empty);
    let twice = oracle_finetune(&goals, archive.iter().map(|(e, t)| (*e, t)), &once);
    assert_eq!(once, twice);
    let report = evaluate_success(&world, &once, &goals);
    assert!(report.rate() > 0.0);
    let recipe_goal = goals.iter().find(|g| g.text == RECIPE_GOAL).unwrap().canonical();
    let eaten = report.outcomes.iter().find(|o| o.goal == recipe_goal).unwrap();
    assert_eq!(eaten.step, Some(10));
    assert!(report.outcomes.iter().filter(|o| o.achieved).all(|o| o.sequence_len.is_some()));
}

#[test]
fn self_evaluation_with_both_judges() {
    let world = World::cooking_world();
    let lm = ScriptedOracle::new(world.clone());
    let mut registry = GoalRegistry::new();
    let traj = slice_trajectory(&world);
    registry.record("slice the red potato", &traj.action_prefix(7), 1);
    registry.record("open the fridge", &traj.action_prefix(4), 1);
    let goals = ["slice the red potato", "open the fridge", "eat the meal"];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let by_oracle = self_evaluate(&world, &registry, &goals, Judge::Oracle, &mut rng).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let judge = Judge::Lm { lm: &lm, model: "oracle", cot: false };
    let by_lm = self_evaluate(&world, &registry, &goals, judge, &mut rng).unwrap();
    assert_eq!(by_oracle, by_lm);
    assert_eq!(by_oracle.successes(), 2);

    let many: Vec<String> = (0..500).map(|i| format!("goal {i}")).collect();
    let report = self_evaluate(&world, &registry, &many, Judge::Oracle, &mut rng).unwrap();
    assert_eq!(report.outcomes.len(), SELF_EVAL_SAMPLE);
    assert_eq!(report.rate(), 0.0);
}

#[test]
fn confusion_rates() {
    let m = confusion(&[true, true, false, false, true], &[true, false, false, true, true]).unwrap();
    assert_eq!((m.true_positive, m.false_positive, m.true_negative, m.false_negative), (2, 1, 1, 1));
    assert_eq!(m.false_positive_rate(), 0.5);
    assert!((m.false_negative_rate() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(m.accuracy(), 0.6);
    assert!(confusion(&[true], &[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn relabels_are_confirmed_by_reward(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..25)) {
        let world = World::cooking_world();
        let lm = ScriptedOracle::new(world.clone());
        let mut state = world.reset();
        let mut actions = Vec::new();
        for p in &picks {
            let admissible = world.admissible_actions(&state);
            let a = admissible[p.index(admissible.len())].to_string();
            state = world.step(&state, &a).unwrap().state;
            actions.push(a);
        }
        let traj = Trajectory::rollout(&world, &actions).unwrap().0;
        let v = PromptVariant::new(LmRole::Relabel, false, false).unwrap();
        let relabels = parse_relabel_response(&ask(&lm, LmRole::Relabel, render_relabel_prompt(&traj, v).unwrap()));
        prop_assume!(!relabels.is_empty());
        let goals: Vec<String> = relabels.entries.iter().map(|(g, _)| g.clone()).collect();
        let verdicts = parse_reward_response(
            &ask(&lm, LmRole::Reward, render_reward_prompt(&traj, &goals, false).unwrap()),
            &goals,
        );
        for ((_, step), v) in relabels.entries.iter().zip(&verdicts) {
            prop_assert_eq!(v.step, Some(*step));
        }
    }
}
