mod common;

use std::path::PathBuf;

use lma3_core::prompt::templates::{self, GOALS_SLOT, INSTRUCTIONS_SLOT, TRAJECTORY_SLOT};
use lma3_core::prompt::{
    render_goalgen_prompt, render_relabel_prompt, render_reward_prompt, serialize_trajectory, PromptError,
    PromptVariant, MAX_INSTRUCTIONS,
};
use lma3_core::{LmRole, Trajectory};

use common::goldens::{fixture_trajectory, golden_name, render, GOALS, INSTRUCTIONS};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/prompts")
}

#[test]
fn seven_variants_match_golden_files() {
    let bless = std::env::var_os("LMA3_BLESS").is_some();
    for v in PromptVariant::all() {
        let path = golden_dir().join(golden_name(v));
        let rendered = render(v);
        if bless {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &rendered).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap();
        assert_eq!(rendered, golden, "{}", path.display());
    }
}

/// The rendered prompt is the template with each slot replaced, and nothing
/// else changed.
#[test]
fn text_outside_slots_is_untouched() {
    let traj = serialize_trajectory(&fixture_trajectory());
    for v in PromptVariant::all() {
        let template = v.template();
        let rendered = render(v);
        let mut pieces: Vec<&str> = vec![template];
        for slot in [TRAJECTORY_SLOT, GOALS_SLOT, INSTRUCTIONS_SLOT] {
            pieces = pieces.iter().flat_map(|p| p.split(slot)).collect();
        }
        let mut at = 0;
        for piece in pieces {
            let found = rendered[at..].find(piece).map(|i| i + at);
            assert!(found.is_some(), "{:?} lost text {piece:?}", v);
            at = found.unwrap() + piece.len();
        }
        assert!(rendered.contains(&traj));
    }
}

#[test]
fn variant_rules() {
    assert!(PromptVariant::new(LmRole::Relabel, false, true).is_err());
    assert!(PromptVariant::new(LmRole::Reward, true, true).is_err());
    assert!(PromptVariant::new(LmRole::Goalgen, true, true).is_err());
    assert!(PromptVariant::new(LmRole::Relabel, true, true).is_ok());
    assert_eq!(PromptVariant::all().len(), 7);
}

#[test]
fn relabel_examples() {
    let base = render(PromptVariant::new(LmRole::Relabel, false, false).unwrap());
    assert!(base.contains("- roast a white onion (step 55)."));
    assert!(base.contains("list the most interesting, impressive, novel or creative goals"));
    assert!(base.ends_with("Answer:\n-"));
    assert!(!base.contains("Let's think step by step"));

    let cot = render(PromptVariant::new(LmRole::Relabel, true, false).unwrap());
    let tail = &cot[cot.find("Example 3:").unwrap()..];
    assert!(tail.contains("Let's think step by step and relabel up to 10 goals."));

    let tips = render(PromptVariant::new(LmRole::Relabel, true, true).unwrap());
    let ex1 = &tips[tips.find("Example 1:").unwrap()..tips.find("Example 2:").unwrap()];
    let answer = &ex1[ex1.find("Answer:").unwrap()..];
    assert!(answer.contains("use the oven for the second time (step 55)."));

    let empty = Trajectory::new();
    let v = PromptVariant::new(LmRole::Relabel, false, false).unwrap();
    assert_eq!(render_relabel_prompt(&empty, v), Err(PromptError::TrajectoryEmpty));
}

#[test]
fn trajectory_block_layout() {
    let block = serialize_trajectory(&fixture_trajectory());
    assert!(
        block.starts_with("\"\"\"\nStep 1.\nAction 1: move south\nObservation 1: You are in the kitchen.")
    );
    assert!(block.contains("Step 2.\nAction 2: open the fridge\nObservation 2: You open the fridge."));
    assert!(block.ends_with("\n\"\"\""));
}

#[test]
fn reward_examples() {
    let traj = fixture_trajectory();
    let p = render_reward_prompt(&traj, &["cook an omelet"], false).unwrap();
    assert!(p.contains("\"cook an omelet\""));
    assert!(p.contains("tell me whether the player achieves these goals"));
    let quoted = render_reward_prompt(&traj, &GOALS, false).unwrap();
    assert!(quoted.contains("\"open the fridge\", \"eat the parsley\", \"cook an omelet\""));

    let cot = render_reward_prompt(&traj, &["cook an omelet"], true).unwrap();
    assert!(cot.contains("Let's think step by step and indicate steps of goal completion:"));
    assert!(!p.contains("Let's think step by step"));
    for prompt in [&p, &cot] {
        assert!(prompt.contains("Example 1:"));
        assert!(prompt.contains("Example 2:"));
        assert_eq!(prompt.matches("Example 3:").count(), 1);
    }
    assert_eq!(render_reward_prompt::<&str>(&traj, &[], false), Err(PromptError::NoGoals));
}

#[test]
fn goalgen_examples() {
    let traj = fixture_trajectory();
    let p = render_goalgen_prompt(&traj, &INSTRUCTIONS, false).unwrap();
    assert!(p.contains("goal: do the dishes. instructions: pick up the plate (#3)"));
    assert!(p.contains("find a sequence of 2, 3, or 4 instructions"));
    assert!(p.contains("#1 go to the kitchen\n#2 open the fridge\n#3 pick up the parsley"));

    let cot = render_goalgen_prompt(&traj, &INSTRUCTIONS, true).unwrap();
    assert!(cot.ends_with(
        "Let's think step by step and find an interesting and creative goal to reach:\nReasoning:"
    ));

    let sixty: Vec<String> = (1..=MAX_INSTRUCTIONS).map(|i| format!("goal {i}")).collect();
    let p = render_goalgen_prompt(&traj, &sixty, false).unwrap();
    assert!(p.contains("#60 goal 60"));
    assert!(!p.contains("#61"));
    let too_many: Vec<String> = (1..=61).map(|i| format!("goal {i}")).collect();
    assert_eq!(render_goalgen_prompt(&traj, &too_many, false), Err(PromptError::TooManyInstructions(61)));
    assert_eq!(render_goalgen_prompt::<&str>(&traj, &[], false), Err(PromptError::NoInstructions));
}

#[test]
fn templates_are_distinct_and_slotted() {
    let all = [
        templates::RELABEL_BASE,
        templates::RELABEL_COT,
        templates::RELABEL_TIPS,
        templates::REWARD_BASE,
        templates::REWARD_COT,
        templates::GOALGEN_BASE,
        templates::GOALGEN_COT,
    ];
    for (i, a) in all.iter().enumerate() {
        assert_eq!(a.matches(TRAJECTORY_SLOT).count(), 1);
        for b in &all[i + 1..] {
            assert_ne!(a, b);
        }
    }
    assert_eq!(templates::REWARD_BASE.matches(GOALS_SLOT).count(), 1);
    assert_eq!(templates::GOALGEN_COT.matches(INSTRUCTIONS_SLOT).count(), 1);
}
