//! Hand-written witness sequences for the evaluation goals.

const WITNESSES: &str = include_str!("../fixtures/witnesses.txt");

/// Hand-written action sequence for an evaluation goal, from the fixture
/// file (goal line, then an indented line of `;`-separated actions).
pub fn witness(goal: &str) -> Vec<String> {
    let mut lines = WITNESSES.lines();
    while let Some(line) = lines.next() {
        let actions = lines.next().unwrap();
        if line == goal {
            return actions.trim().split("; ").map(String::from).collect();
        }
    }
    panic!("no witness for {goal}")
}
