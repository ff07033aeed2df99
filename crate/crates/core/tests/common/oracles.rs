//! Brute-force reference implementations for the diversity metrics.

/// Hill number by direct summation over raw counts, written independently of
/// the library (natural log entropy for order 1).
pub fn hill_oracle(counts: &[u64], q: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    let ps: Vec<f64> = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / total as f64).collect();
    if q == 1.0 {
        let mut h = 0.0;
        for p in &ps {
            h -= p * p.ln();
        }
        h.exp()
    } else {
        let mut s = 0.0;
        for p in &ps {
            s += p.powf(q);
        }
        s.powf(1.0 / (1.0 - q))
    }
}

/// Largest h in 0..=n with at least h counts >= h, by checking every h.
pub fn h_index_oracle(counts: &[u64]) -> usize {
    let mut best = 0;
    for h in 0..=counts.len() {
        if counts.iter().filter(|&&c| c >= h as u64).count() >= h {
            best = h;
        }
    }
    best
}
