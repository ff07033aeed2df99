use alloc::vec;
use alloc::vec::Vec;

use super::MetricsError;
use crate::text::fnv1a64;

pub const EMBEDDING_DIM: usize = 512;

/// Text to unit-length vector.
pub trait Embedder {
    fn embed(&self, text: &str) -> Vec<f64>;
}

/// Hashed character-trigram term frequencies over the lowercased text.
#[derive(Clone, Copy, Debug)]
pub struct TrigramEmbedder {
    pub dim: usize,
}

impl Default for TrigramEmbedder {
    fn default() -> Self {
        TrigramEmbedder { dim: EMBEDDING_DIM }
    }
}

impl Embedder for TrigramEmbedder {
    fn embed(&self, text: &str) -> Vec<f64> {
        let chars: Vec<char> = text.to_lowercase().chars().collect();
        let mut v = vec![0.0; self.dim.max(1)];
        let mut buf = [0u8; 12];
        for w in chars.windows(3) {
            let mut n = 0;
            for c in w {
                n += c.encode_utf8(&mut buf[n..]).len();
            }
            let bucket = (fnv1a64(&buf[..n]) % v.len() as u64) as usize;
            v[bucket] += 1.0;
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }
}

/// 1 - cosine similarity; 1 when either vector is zero.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    let nb = libm::sqrt(b.iter().map(|x| x * x).sum::<f64>());
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    (1.0 - dot / (na * nb)).clamp(0.0, 2.0)
}

/// Distance from `goal` to its nearest neighbour in `corpus`, ignoring one
/// exact copy of `goal` itself.
pub fn novelty<S: AsRef<str>, E: Embedder + ?Sized>(
    goal: &str,
    corpus: &[S],
    embedder: &E,
) -> Result<f64, MetricsError> {
    if corpus.len() < 2 {
        return Err(MetricsError::CorpusTooSmall(corpus.len()));
    }
    let own = corpus.iter().position(|c| c.as_ref() == goal);
    let g = embedder.embed(goal);
    let best = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != own)
        .map(|(_, c)| cosine_distance(&g, &embedder.embed(c.as_ref())))
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}
