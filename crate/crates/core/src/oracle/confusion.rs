use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{verdicts} verdicts but {labels} labels")]
pub struct LengthMismatch {
    pub verdicts: usize,
    pub labels: usize,
}

/// Judge verdicts scored against ground-truth labels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positive: u64,
    pub false_positive: u64,
    pub true_negative: u64,
    pub false_negative: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn positives(&self) -> u64 {
        self.true_positive + self.false_negative
    }

    pub fn negatives(&self) -> u64 {
        self.true_negative + self.false_positive
    }

    /// Share of true negatives the judge called positive. 0 without negatives.
    pub fn false_positive_rate(&self) -> f64 {
        ratio(self.false_positive, self.negatives())
    }

    /// Share of true positives the judge missed. 0 without positives.
    pub fn false_negative_rate(&self) -> f64 {
        ratio(self.false_negative, self.positives())
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.true_positive + self.true_negative, self.total())
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn confusion(verdicts: &[bool], labels: &[bool]) -> Result<ConfusionMatrix, LengthMismatch> {
    if verdicts.len() != labels.len() {
        return Err(LengthMismatch { verdicts: verdicts.len(), labels: labels.len() });
    }
    let mut m = ConfusionMatrix::default();
    for (&v, &l) in verdicts.iter().zip(labels) {
        match (v, l) {
            (true, true) => m.true_positive += 1,
            (true, false) => m.false_positive += 1,
            (false, false) => m.true_negative += 1,
            (false, true) => m.false_negative += 1,
        }
    }
    Ok(m)
}
