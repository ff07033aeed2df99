use lma3_core::agent::{chain_sequences, execute_plan, rarity_weights, sample_rare};
use lma3_core::{GoalRegistry, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seq(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Fraction of truncated executions over 10k plays of a two-subgoal plan.
fn truncation_frequency(runs: u64, seed: u64) -> f64 {
    let world = World::cooking_world();
    let plan = vec![
        seq(&["move south", "open the fridge", "pick up the parsley"]),
        seq(&["open the kitchen cupboard", "pick up the knife", "slice the parsley", "eat the parsley"]),
    ];
    let registry = GoalRegistry::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truncated = 0;
    for _ in 0..runs {
        let exec = execute_plan(&world, &plan, &registry, 0.2, &mut rng);
        if let Some(kept) = exec.truncated_at {
            assert!(kept < 4);
            assert_eq!(exec.planned, 3 + kept);
            truncated += 1;
        } else {
            assert_eq!(exec.planned, 7);
        }
        let actions: Vec<&str> = exec.trajectory.actions().take(exec.planned).collect();
        let chained: Vec<&str> = plan.iter().flatten().map(String::as_str).take(exec.planned).collect();
        assert_eq!(actions, chained);
        assert_eq!(exec.trajectory.len(), 25);
    }
    truncated as f64 / runs as f64
}

#[test]
fn truncation_rate_is_epsilon() {
    let f = truncation_frequency(10_000, 2024);
    assert!((f - 0.2).abs() <= 0.02, "{f}");
}

#[test]
fn truncation_point_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let last = seq(&["a", "b", "c", "d"]);
    let mut hist = [0u32; 4];
    let mut n = 0;
    for _ in 0..40_000 {
        let (_, cut) = chain_sequences(std::slice::from_ref(&last), 1.0, &mut rng);
        hist[cut.unwrap()] += 1;
        n += 1;
    }
    for h in hist {
        assert!((h as f64 / n as f64 - 0.25).abs() < 0.01, "{hist:?}");
    }
    let (out, cut) = chain_sequences(&[seq(&["x"]), seq(&["y", "z"])], 0.0, &mut rng);
    assert_eq!((out, cut), (seq(&["x", "y", "z"]), None));
}

fn fixture_count(a: &str) -> u64 {
    match a {
        "a" => 1,
        "b" => 3,
        "c" => 0,
        "d" => 10,
        "e" => 2,
        _ => unreachable!(),
    }
}

#[test]
fn rarity_sampler_total_variation() {
    let actions = ["a", "b", "c", "d", "e"];
    let recip: Vec<f64> = actions.iter().map(|a| 1.0 / fixture_count(a).max(1) as f64).collect();
    let z: f64 = recip.iter().sum();
    let expected: Vec<f64> = recip.iter().map(|r| r / z).collect();

    let w = rarity_weights(&actions, fixture_count);
    assert_eq!(w, recip);

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut hits = [0u64; 5];
    let draws = 100_000;
    for _ in 0..draws {
        hits[sample_rare(&actions, fixture_count, &mut rng).unwrap()] += 1;
    }
    let tv: f64 =
        hits.iter().zip(&expected).map(|(&h, &p)| (h as f64 / draws as f64 - p).abs()).sum::<f64>() / 2.0;
    assert!(tv < 0.01, "total variation {tv}");
}

#[test]
fn two_action_example() {
    let actions = ["a", "b"];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    let a = (0..n).filter(|_| sample_rare(&actions, fixture_count, &mut rng) == Some(0)).count();
    assert!((a as f64 / n as f64 - 0.75).abs() < 0.01);
    assert_eq!(sample_rare(&[], fixture_count, &mut rng), None);
}

#[test]
fn tail_counts_every_action() {
    let world = World::cooking_world();
    let mut registry = GoalRegistry::new();
    registry.note_action("move south", 1_000_000);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let exec = execute_plan::<Vec<String>, _>(&world, &[], &registry, 0.2, &mut rng);
    assert_eq!(exec.counted.values().sum::<u64>(), 25);
    assert_eq!(exec.trajectory.steps[0].action, "move south");
    assert_eq!(registry.occurrence("move south"), 1_000_000);
}
