//! Parser transcript fixtures: a `# kind:`, `# context:` and `# expect:`
//! header, a `---` line, then the raw model answer.

use std::path::{Path, PathBuf};

use lma3_core::prompt::{parse_goalgen_response, parse_relabel_response, parse_reward_response};

pub struct Fixture {
    pub name: String,
    pub kind: String,
    pub context: Vec<String>,
    pub expect: Vec<String>,
    pub body: String,
}

pub fn load_fixtures(dir: &Path) -> Vec<Fixture> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let (header, body) = text.split_once("---\n").unwrap();
            let mut f = Fixture {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                kind: String::new(),
                context: Vec::new(),
                expect: Vec::new(),
                body: body.to_string(),
            };
            for line in header.lines() {
                if let Some(k) = line.strip_prefix("# kind: ") {
                    f.kind = k.to_string();
                } else if let Some(c) = line.strip_prefix("# context: ") {
                    f.context = c.split(" | ").map(String::from).collect();
                } else if let Some(e) = line.strip_prefix("# expect: ") {
                    f.expect.push(e.to_string());
                }
            }
            f
        })
        .collect()
}

pub fn check(f: &Fixture) {
    match f.kind.as_str() {
        "relabel" => {
            let got = parse_relabel_response(&f.body);
            let want: Vec<(String, u32)> = f
                .expect
                .iter()
                .map(|e| {
                    let (g, s) = e.rsplit_once(" @ ").unwrap();
                    (g.to_string(), s.parse().unwrap())
                })
                .collect();
            assert_eq!(got.entries, want, "{}", f.name);
        }
        "reward" => {
            let got = parse_reward_response(&f.body, &f.context);
            assert_eq!(got.len(), f.context.len(), "{}", f.name);
            for ((v, want), goal) in got.iter().zip(&f.expect).zip(&f.context) {
                assert_eq!(&v.goal, goal, "{}", f.name);
                match want.strip_prefix("yes ") {
                    Some(step) => {
                        assert!(v.achieved, "{}: {goal}", f.name);
                        assert_eq!(v.step, Some(step.parse().unwrap()), "{}: {goal}", f.name);
                    }
                    None => {
                        assert!(!v.achieved, "{}: {goal}", f.name);
                        assert_eq!(v.step, None, "{}: {goal}", f.name);
                    }
                }
            }
        }
        "goalgen" => {
            let got = parse_goalgen_response(&f.body, &f.context);
            if f.expect[0] == "error" {
                assert!(got.is_err(), "{}: {got:?}", f.name);
                return;
            }
            let (main, idx) = f.expect[0].split_once(" | ").unwrap();
            let idx: Vec<usize> = idx.split(',').map(|i| i.parse().unwrap()).collect();
            let plan = got.unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert_eq!(plan.main_goal, main, "{}", f.name);
            assert_eq!(plan.indices(), idx, "{}", f.name);
            for s in &plan.subgoals {
                assert_eq!(s.text, f.context[s.index - 1]);
            }
        }
        other => panic!("{}: unknown kind {other}", f.name),
    }
}
