//! Repertoire diversity: stems, Hill numbers, stem h-index, abstraction
//! ratios, cross-seed uniqueness and embedding novelty.

mod embed;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use embed::{cosine_distance, novelty, Embedder, TrigramEmbedder, EMBEDDING_DIM};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("goal text has no content word")]
    EmptyGoal,
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("hill order must be non-negative")]
    NegativeOrder,
    #[error("novelty needs a corpus of at least 2 entries, got {0}")]
    CorpusTooSmall(usize),
}

/// Maps a word to its stem.
pub trait WordStemmer {
    fn stem(&self, word: &str) -> String;
}

/// Leaves words unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoStemmer;

impl WordStemmer for NoStemmer {
    fn stem(&self, word: &str) -> String {
        word.into()
    }
}

impl<F: Fn(&str) -> String> WordStemmer for F {
    fn stem(&self, word: &str) -> String {
        self(word)
    }
}

const ARTICLES: [&str; 3] = ["the", "a", "an"];

/// Lowercased words with surrounding punctuation removed.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|w| w.trim_matches('\'').to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// First word that is not an article.
pub fn first_content_word(goal: &str) -> Option<String> {
    words(goal).into_iter().find(|w| !ARTICLES.contains(&w.as_str()))
}

pub fn stem_of<S: WordStemmer + ?Sized>(goal: &str, stemmer: &S) -> Result<String, MetricsError> {
    let word = first_content_word(goal).ok_or(MetricsError::EmptyGoal)?;
    Ok(stemmer.stem(&word))
}

/// Goal counts per stem.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StemDistribution {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl StemDistribution {
    pub fn from_stems<I: IntoIterator<Item = S>, S: Into<String>>(stems: I) -> Self {
        let mut d = StemDistribution::default();
        for s in stems {
            *d.counts.entry(s.into()).or_insert(0) += 1;
            d.total += 1;
        }
        d
    }

    /// Zero counts are dropped.
    pub fn from_counts<I: IntoIterator<Item = (S, u64)>, S: Into<String>>(counts: I) -> Self {
        let mut d = StemDistribution::default();
        for (s, c) in counts {
            if c > 0 {
                *d.counts.entry(s.into()).or_insert(0) += c;
                d.total += c;
            }
        }
        d
    }

    /// Stems each goal with `stemmer`; goals without a content word are skipped.
    pub fn from_goals<I, S, T>(goals: I, stemmer: &T) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: WordStemmer + ?Sized,
    {
        Self::from_stems(goals.into_iter().filter_map(|g| stem_of(g.as_ref(), stemmer).ok()))
    }

    pub fn richness(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        let total = self.total as f64;
        self.counts.values().map(move |&c| c as f64 / total)
    }
}

/// Hill number of order `q`; order 1 is the exponential of Shannon entropy.
pub fn hill_number(dist: &StemDistribution, q: f64) -> Result<f64, MetricsError> {
    if dist.is_empty() {
        return Err(MetricsError::EmptyDistribution);
    }
    if q.is_nan() || q < 0.0 {
        return Err(MetricsError::NegativeOrder);
    }
    if q == 1.0 {
        let h: f64 = dist.probabilities().map(|p| -p * libm::log(p)).sum();
        return Ok(libm::exp(h));
    }
    let s: f64 = dist.probabilities().map(|p| libm::pow(p, q)).sum();
    Ok(libm::pow(s, 1.0 / (1.0 - q)))
}

/// Largest h such that h stems have at least h goals each.
pub fn stem_h_index(dist: &StemDistribution) -> usize {
    let mut counts: Vec<u64> = dist.counts.values().copied().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts.iter().enumerate().take_while(|(i, &c)| c > *i as u64).count()
}

pub const CONJUNCTION_WORDS: [&str; 4] = ["and", "two", "three", "several times"];
pub const CATEGORY_WORDS: [&str; 7] =
    ["ingredients", "items", "container", "somewhere", "fruit", "vegetable", "tool"];

/// Whole-word (or whole-phrase) match, case-insensitive.
pub fn contains_phrase(goal_words: &[String], phrase: &str) -> bool {
    let target = words(phrase);
    !target.is_empty() && goal_words.windows(target.len()).any(|w| w == target.as_slice())
}

/// Fractions of goals using a conjunction word and a category word.
pub fn abstraction_counts<S: AsRef<str>>(goals: &[S]) -> (f64, f64) {
    if goals.is_empty() {
        return (0.0, 0.0);
    }
    let mut conj = 0usize;
    let mut cat = 0usize;
    for g in goals {
        let w = words(g.as_ref());
        if CONJUNCTION_WORDS.iter().any(|p| contains_phrase(&w, p)) {
            conj += 1;
        }
        if CATEGORY_WORDS.iter().any(|p| contains_phrase(&w, p)) {
            cat += 1;
        }
    }
    let n = goals.len() as f64;
    (conj as f64 / n, cat as f64 / n)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UniqueGoals {
    pub unique: BTreeSet<String>,
    pub ratio: f64,
}

/// Goals found by one key and no other.
pub fn unique_goals<K: Ord + Clone>(sets: &BTreeMap<K, BTreeSet<String>>) -> BTreeMap<K, UniqueGoals> {
    let mut seen_by: BTreeMap<&str, usize> = BTreeMap::new();
    for set in sets.values() {
        for g in set {
            *seen_by.entry(g.as_str()).or_insert(0) += 1;
        }
    }
    sets.iter()
        .map(|(k, set)| {
            let unique: BTreeSet<String> = set.iter().filter(|g| seen_by[g.as_str()] == 1).cloned().collect();
            let ratio = if set.is_empty() { 0.0 } else { unique.len() as f64 / set.len() as f64 };
            (k.clone(), UniqueGoals { unique, ratio })
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub n_goals: usize,
    pub d0: f64,
    pub d1: f64,
    pub h_index: usize,
    pub conjunction_ratio: f64,
    pub category_ratio: f64,
}

impl DiversityReport {
    /// Report over a goal set; duplicates should already be removed.
    pub fn compute<S: AsRef<str>, T: WordStemmer + ?Sized>(goals: &[S], stemmer: &T) -> Self {
        let dist = StemDistribution::from_goals(goals, stemmer);
        let (conjunction_ratio, category_ratio) = abstraction_counts(goals);
        DiversityReport {
            n_goals: goals.len(),
            d0: hill_number(&dist, 0.0).unwrap_or(0.0),
            d1: hill_number(&dist, 1.0).unwrap_or(0.0),
            h_index: stem_h_index(&dist),
            conjunction_ratio,
            category_ratio,
        }
    }
}
