//! Small string helpers shared by the world renderer, the prompt kit and the
//! metrics.

use alloc::string::String;
use alloc::vec::Vec;

/// Joins items the way room descriptions do: `a`, `a and b`, `a, b, and c`.
pub fn join_list<S: AsRef<str>>(items: &[S]) -> String {
    let mut out = String::new();
    let n = items.len();
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            if n == 2 {
                out.push_str(" and ");
            } else if i == n - 1 {
                out.push_str(", and ");
            } else {
                out.push_str(", ");
            }
        }
        out.push_str(item.as_ref());
    }
    out
}

/// `a` or `an` for the word that follows.
pub fn indefinite_article(word: &str) -> &'static str {
    match word.chars().next() {
        Some(c) if "aeiouAEIOU".contains(c) => "an",
        _ => "a",
    }
}

/// Canonical form of a goal description: trimmed, inner whitespace collapsed,
/// sentence-final periods stripped, first letter lowercased.
pub fn canonical_goal(text: &str) -> String {
    let collapsed: Vec<&str> = text.split_whitespace().collect();
    let mut s = collapsed.join(" ");
    while s.ends_with('.') {
        s.pop();
        let trimmed_len = s.trim_end().len();
        s.truncate(trimmed_len);
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => {
            let mut out: String = first.to_lowercase().collect();
            out.push_str(chars.as_str());
            out
        }
        None => String::new(),
    }
}

/// 64-bit FNV-1a. Used wherever a stable, platform-independent hash of text is
/// needed (embedding buckets, seeding scripted responses).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Lowercases ASCII and compares.
pub fn eq_ignore_case(a: &str, b: &str) -> bool {
    a.len() == b.len() && a.chars().zip(b.chars()).all(|(x, y)| x.eq_ignore_ascii_case(&y))
}
