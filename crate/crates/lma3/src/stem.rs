//! English stemming for the diversity metrics.

use lma3_core::metrics::{self, MetricsError, WordStemmer};
use rust_stemmers::{Algorithm, Stemmer};

/// Snowball English (Porter2) stemmer.
pub struct EnglishStemmer(Stemmer);

impl Default for EnglishStemmer {
    fn default() -> Self {
        EnglishStemmer(Stemmer::create(Algorithm::English))
    }
}

impl WordStemmer for EnglishStemmer {
    fn stem(&self, word: &str) -> String {
        self.0.stem(word).into_owned()
    }
}

/// Stem of the first content word of a goal.
pub fn stem_of(goal: &str) -> Result<String, MetricsError> {
    metrics::stem_of(goal, &EnglishStemmer::default())
}
