use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::render::MAX_RELABELS;
use crate::text::canonical_goal;

/// Goals the relabeler claims were achieved, with completion steps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabelResult {
    pub entries: Vec<(String, u32)>,
}

impl RelabelResult {
    /// Drops entries whose step falls outside `1..=len`.
    pub fn within(mut self, len: usize) -> Self {
        self.entries.retain(|(_, step)| *step >= 1 && (*step as usize) <= len);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardVerdict {
    pub goal: String,
    pub achieved: bool,
    pub step: Option<u32>,
}

impl RewardVerdict {
    pub fn yes(goal: &str, step: u32) -> Self {
        RewardVerdict { goal: goal.into(), achieved: true, step: Some(step) }
    }

    pub fn no(goal: &str) -> Self {
        RewardVerdict { goal: goal.into(), achieved: false, step: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgoal {
    /// 1-based position in the instruction list of the prompt.
    pub index: usize,
    pub text: String,
}

/// A main goal and its decomposition into known instructions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodePlan {
    pub main_goal: String,
    pub subgoals: Vec<Subgoal>,
}

impl EpisodePlan {
    /// Answer line in the goal-generator format.
    pub fn to_answer(&self) -> String {
        let items: Vec<String> = self.subgoals.iter().map(|s| format!("{} (#{})", s.text, s.index)).collect();
        format!("goal: {}. instructions: {}.", self.main_goal, items.join("; "))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.subgoals.iter().map(|s| s.index).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("no `goal: ... instructions: ...` answer found")]
    NoAnswer,
    #[error("empty main goal")]
    EmptyGoal,
    #[error("{0} valid instruction references, need 2 to 4")]
    BadReferenceCount(usize),
}

/// Full answer text for a completion of `prompt`. Templates that end in an
/// open `-` bullet expect the model to continue it, so the dash is restored.
pub fn answer_text(prompt: &str, completion: &str) -> String {
    if prompt.ends_with('-') && !completion.trim_start().starts_with('-') {
        format!("-{completion}")
    } else {
        String::from(completion)
    }
}

/// Case-insensitive search for an ASCII needle.
fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.is_empty() || h.len() < n.len() {
        return None;
    }
    (from..=h.len() - n.len()).find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

fn rfind_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.is_empty() || h.len() < n.len() {
        return None;
    }
    (0..=h.len() - n.len()).rev().find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

/// Last unsigned integer in `s`.
fn last_integer(s: &str) -> Option<u32> {
    let mut last = None;
    let mut current: Option<u64> = None;
    for c in s.chars() {
        if let Some(d) = c.to_digit(10) {
            let v = current.unwrap_or(0).saturating_mul(10).saturating_add(u64::from(d));
            current = Some(v);
        } else if let Some(v) = current.take() {
            last = Some(v);
        }
    }
    if let Some(v) = current {
        last = Some(v);
    }
    last.and_then(|v| u32::try_from(v).ok())
}

/// Finds the last `(step N)` / `(Step N)` / `(steps N and M)` group. Returns
/// the byte offset of its `(`, the offset just past its `)`, and the step.
fn step_group(s: &str) -> Option<(usize, usize, u32)> {
    let open = rfind_ci(s, "(step")?;
    let close = open + s[open..].find(')')?;
    let step = last_integer(&s[open..close])?;
    Some((open, close + 1, step))
}

/// Extracts `- <goal> (step N).` lines. Malformed lines are skipped, goals are
/// canonicalized and deduplicated case-insensitively, and at most ten entries
/// are kept in order of appearance.
pub fn parse_relabel_response(text: &str) -> RelabelResult {
    let mut entries: Vec<(String, u32)> = Vec::new();
    let mut seen: Vec<String> = Vec::new();
    for line in text.lines() {
        if entries.len() == MAX_RELABELS {
            break;
        }
        let Some(body) = line.trim().strip_prefix('-') else {
            continue;
        };
        let Some((open, close, step)) = step_group(body) else {
            continue;
        };
        if !body[close..].chars().all(|c| c == '.' || c.is_whitespace()) {
            continue;
        }
        let goal = canonical_goal(&body[..open]);
        if goal.is_empty() {
            continue;
        }
        let key = goal.to_lowercase();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        entries.push((goal, step));
    }
    RelabelResult { entries }
}

struct AnswerLine {
    fragment: String,
    achieved: bool,
    step: Option<u32>,
}

fn parse_answer_line(line: &str) -> Option<AnswerLine> {
    let body = line.trim().strip_prefix('-')?;
    let answer_at = rfind_ci(body, "answer:")?;
    let head = &body[..answer_at];
    let fragment_end = find_ci(head, "reasoning:", 0).unwrap_or(head.len());
    let fragment = canonical_goal(&head[..fragment_end]);
    let verdict = body[answer_at + "answer:".len()..].trim_start();
    let says_yes = verdict.get(..3).is_some_and(|w| w.eq_ignore_ascii_case("yes"));
    let step = if says_yes { step_group(verdict).map(|(_, _, s)| s) } else { None };
    Some(AnswerLine { fragment, achieved: step.is_some(), step })
}

/// Length in bytes of the longest common substring, ASCII case-insensitive.
fn longest_common_substring(a: &str, b: &str) -> usize {
    let a = a.as_bytes();
    let b = b.as_bytes();
    let mut prev = alloc::vec![0usize; b.len() + 1];
    let mut best = 0;
    for &x in a {
        let mut cur = alloc::vec![0usize; b.len() + 1];
        for (j, &y) in b.iter().enumerate() {
            if x.eq_ignore_ascii_case(&y) {
                cur[j + 1] = prev[j] + 1;
                best = best.max(cur[j + 1]);
            }
        }
        prev = cur;
    }
    best
}

/// Binds `- ... Answer: yes (step N).` lines to goals. When the number of
/// answer lines equals the number of goals they are matched by position;
/// otherwise each line is matched to the goal sharing the longest common
/// substring with its restated goal. Anything ambiguous or missing is a "no",
/// and a "yes" without a step is a "no".
pub fn parse_reward_response<S: AsRef<str>>(text: &str, goals: &[S]) -> Vec<RewardVerdict> {
    let lines: Vec<AnswerLine> = text.lines().filter_map(parse_answer_line).collect();
    let mut verdicts: Vec<RewardVerdict> = goals.iter().map(|g| RewardVerdict::no(g.as_ref())).collect();

    if lines.len() == goals.len() {
        for (verdict, line) in verdicts.iter_mut().zip(&lines) {
            verdict.achieved = line.achieved;
            verdict.step = line.step;
        }
        return verdicts;
    }

    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for (li, line) in lines.iter().enumerate() {
        if line.fragment.is_empty() {
            continue;
        }
        for (gi, goal) in goals.iter().enumerate() {
            let goal = canonical_goal(goal.as_ref());
            let score = longest_common_substring(&line.fragment, &goal);
            let needed = (goal.len().min(line.fragment.len()) / 2).max(3);
            if score >= needed {
                candidates.push((score, li, gi));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut line_used = alloc::vec![false; lines.len()];
    let mut goal_used = alloc::vec![false; goals.len()];
    for (_, li, gi) in candidates {
        if line_used[li] || goal_used[gi] {
            continue;
        }
        line_used[li] = true;
        goal_used[gi] = true;
        verdicts[gi].achieved = lines[li].achieved;
        verdicts[gi].step = lines[li].step;
    }
    verdicts
}

/// Parses `goal: <desc>. instructions: a (#i); b (#j).` Subgoal texts come
/// from `instructions`, not from the answer. References outside the list are
/// dropped; the plan needs 2 to 4 valid ones.
pub fn parse_goalgen_response<S: AsRef<str>>(
    text: &str,
    instructions: &[S],
) -> Result<EpisodePlan, PlanError> {
    let mut search_end = text.len();
    let (goal_at, instr_at) = loop {
        let goal_at = rfind_ci(&text[..search_end], "goal:").ok_or(PlanError::NoAnswer)?;
        if let Some(instr_at) = find_ci(text, "instructions:", goal_at) {
            break (goal_at, instr_at);
        }
        search_end = goal_at;
    };
    let main_goal = canonical_goal(&text[goal_at + "goal:".len()..instr_at]);
    if main_goal.is_empty() {
        return Err(PlanError::EmptyGoal);
    }

    let list_start = instr_at + "instructions:".len();
    let list_end = text[list_start..].find('\n').map_or(text.len(), |i| list_start + i);
    let mut subgoals = Vec::new();
    for item in text[list_start..list_end].split(';') {
        let Some(hash) = item.find("(#") else {
            continue;
        };
        let digits: String = item[hash + 2..].chars().take_while(|c| c.is_ascii_digit()).collect();
        let rest = &item[hash + 2 + digits.len()..];
        if digits.is_empty() || !rest.starts_with(')') {
            continue;
        }
        let Ok(index) = digits.parse::<usize>() else {
            continue;
        };
        if index == 0 || index > instructions.len() {
            continue;
        }
        subgoals.push(Subgoal { index, text: instructions[index - 1].as_ref().into() });
    }
    if !(2..=4).contains(&subgoals.len()) {
        return Err(PlanError::BadReferenceCount(subgoals.len()));
    }
    Ok(EpisodePlan { main_goal, subgoals })
}
