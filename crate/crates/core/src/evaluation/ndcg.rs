use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gain {
    /// The relevance itself.
    #[default]
    Linear,
    /// `2^rel − 1`.
    Exponential,
}

impl Gain {
    fn apply(self, rel: f64) -> f64 {
        match self {
            Gain::Linear => rel,
            Gain::Exponential => rel.exp2() - 1.0,
        }
    }
}

fn dcg(order: &[usize], truth: &[f64], gain: Gain) -> f64 {
    order
        .iter()
        .enumerate()
        .map(|(i, &j)| gain.apply(truth[j]) / ((i + 2) as f64).log2())
        .sum()
}

fn descending(keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    order
}

/// Normalized DCG of the ranking induced by `predicted`, with `truth` as relevance.
///
/// Position `i` (from 1) is discounted by `log₂(i + 1)`; ties in `predicted`
/// keep the lower index first. An all-zero `truth` scores 1.0.
pub fn ndcg(predicted: &[f64], truth: &[f64], gain: Gain) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions but {} true values",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::InvalidInput("empty ranking".into()));
    }
    if predicted.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN prediction".into()));
    }
    if let Some(t) = truth.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "true values must be finite and non-negative, got {t}"
        )));
    }
    let ideal = dcg(&descending(truth), truth, gain);
    if ideal == 0.0 {
        return Ok(1.0);
    }
    Ok(dcg(&descending(predicted), truth, gain) / ideal)
}
