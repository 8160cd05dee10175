//! Expected improvement over a discrete candidate set.
//!
//! Already screened candidates have their acquisition value replaced by zero
//! before the argmax, so they can only be picked again if nothing else has a
//! positive value, and even then the lowest-index unscreened candidate wins.

use std::collections::HashSet;

use libm::erfc;

use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::gp::FittedGP;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `E[max(f − f_best, 0)]` for `f ~ N(mu, var)`.
pub fn expected_improvement(mu: f64, var: f64, f_best: f64) -> f64 {
    let s = var.max(0.0).sqrt();
    let gain = mu - f_best;
    if s == 0.0 {
        return gain.max(0.0);
    }
    let z = gain / s;
    (s * (z * normal_cdf(z) + normal_pdf(z))).max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcquisitionResult {
    /// EI per candidate, zero for screened ones.
    pub values: Vec<f64>,
    /// Position of the chosen candidate within the candidate list.
    pub chosen: usize,
}

/// EI at each candidate row of `store`, screened rows zeroed.
pub fn ei_values(
    gp: &FittedGP,
    store: &EmbeddingStore,
    candidates: &[usize],
    screened: &HashSet<usize>,
    f_best: f64,
) -> Result<Vec<f64>> {
    if store.dim() != gp.dim() {
        return Err(Error::DimensionMismatch {
            expected: gp.dim(),
            got: store.dim(),
        });
    }
    candidates
        .iter()
        .map(|&row| {
            if row >= store.len() {
                return Err(Error::InvalidInput(format!("candidate row {row} out of range")));
            }
            if screened.contains(&row) {
                return Ok(0.0);
            }
            let (mu, var) = gp.posterior(&store.row_f64(row))?;
            Ok(expected_improvement(mu, var, f_best))
        })
        .collect()
}

/// Zeroes screened entries in place and returns the masked argmax.
pub fn argmax_unscreened(
    values: &mut [f64],
    candidates: &[usize],
    screened: &HashSet<usize>,
) -> Result<usize> {
    let mut chosen: Option<usize> = None;
    for (i, &row) in candidates.iter().enumerate() {
        if screened.contains(&row) {
            values[i] = 0.0;
            continue;
        }
        if chosen.is_none_or(|c| values[i] > values[c]) {
            chosen = Some(i);
        }
    }
    chosen.ok_or(Error::SearchSpaceExhausted)
}

/// Positions of the `q` highest unscreened values, best first, ties to the lower position.
pub fn top_unscreened(
    values: &mut [f64],
    candidates: &[usize],
    screened: &HashSet<usize>,
    q: usize,
) -> Result<Vec<usize>> {
    let mut open: Vec<usize> = Vec::with_capacity(candidates.len());
    for (i, &row) in candidates.iter().enumerate() {
        if screened.contains(&row) {
            values[i] = 0.0;
        } else {
            open.push(i);
        }
    }
    if open.is_empty() {
        return Err(Error::SearchSpaceExhausted);
    }
    if open.len() < q {
        return Err(Error::InvalidInput(format!(
            "batch of {q} requested but only {} unscreened candidates remain",
            open.len()
        )));
    }
    open.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    open.truncate(q);
    Ok(open)
}

pub fn select_next(
    gp: &FittedGP,
    store: &EmbeddingStore,
    candidates: &[usize],
    screened: &HashSet<usize>,
    f_best: f64,
) -> Result<AcquisitionResult> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("empty candidate set".into()));
    }
    let mut values = ei_values(gp, store, candidates, screened, f_best)?;
    let chosen = argmax_unscreened(&mut values, candidates, screened)?;
    Ok(AcquisitionResult { values, chosen })
}

/// The `q` unscreened candidates with the highest EI, in descending EI order.
pub fn select_batch(
    gp: &FittedGP,
    store: &EmbeddingStore,
    candidates: &[usize],
    screened: &HashSet<usize>,
    f_best: f64,
    q: usize,
) -> Result<Vec<usize>> {
    if q == 0 {
        return Err(Error::InvalidInput("batch size must be positive".into()));
    }
    let mut values = ei_values(gp, store, candidates, screened, f_best)?;
    top_unscreened(&mut values, candidates, screened, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::synth_store;
    use crate::gp::{fit, FitOptions, LengthScalePrior};
    use crate::landscape::enumerate_variants;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn ei_at_zero_z() {
        let ei = expected_improvement(2.0, 1.0, 2.0);
        assert!((ei - 0.398_942_3).abs() < 1e-7);
        assert!((ei - FRAC_1_SQRT_2PI).abs() < 1e-15);
    }

    #[test]
    fn ei_without_uncertainty() {
        assert_eq!(expected_improvement(1.0, 0.0, 2.0), 0.0);
        assert_eq!(expected_improvement(2.0, 0.0, 2.0), 0.0);
        assert_eq!(expected_improvement(3.5, 0.0, 2.0), 1.5);
    }

    #[test]
    fn cdf_reference_values() {
        for (z, want) in [
            (1.0, 0.841_344_746_068_542_9),
            (-3.0, 0.001_349_898_031_630_094_5),
            (-8.0, 6.220_960_574_271_784e-16),
            (5.0, 0.999_999_713_348_428_1),
        ] {
            let got = normal_cdf(z);
            assert!(((got - want) / want).abs() < 1e-12, "{z}: {got:e} vs {want:e}");
        }
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn ei_matches_monte_carlo() {
        let (mu, s, best) = (1.0, 0.5, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            let g = (mu + s * z - best).max(0.0);
            sum += g;
            sum_sq += g * g;
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
        let ei = expected_improvement(mu, s * s, best);
        assert!((ei - mean).abs() < 3.0 * se, "{ei} vs {mean} ± {se}");
    }

    fn fitted(seed: u64) -> (crate::embeddings::EmbeddingStore, FittedGP, HashSet<usize>) {
        let store = synth_store(&enumerate_variants(2).unwrap(), 8, seed).unwrap();
        let screened: HashSet<usize> = [0usize, 21, 57, 133, 302].into_iter().collect();
        let mut rows: Vec<usize> = screened.iter().copied().collect();
        rows.sort_unstable();
        let x: Vec<Vec<f64>> = rows.iter().map(|&r| store.row_f64(r)).collect();
        let y: Vec<f64> = rows.iter().map(|&r| (r % 7) as f64).collect();
        let gp = fit(&x, &y, &LengthScalePrior::for_dim(8), &FitOptions::default()).unwrap();
        (store, gp, screened)
    }

    #[test]
    fn single_open_candidate_is_chosen() {
        let (store, gp, _) = fitted(1);
        let candidates = vec![0, 21, 57, 200];
        let screened: HashSet<usize> = [0, 21, 57].into_iter().collect();
        let r = select_next(&gp, &store, &candidates, &screened, gp.best_observed()).unwrap();
        assert_eq!(r.chosen, 3);
        assert_eq!(&r.values[..3], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let mut values = vec![0.5, 0.7, 0.7, 0.1];
        let c = argmax_unscreened(&mut values, &[0, 1, 2, 3], &HashSet::new()).unwrap();
        assert_eq!(c, 1);
        let mut values = vec![0.0; 4];
        let screened: HashSet<usize> = [0, 1].into_iter().collect();
        assert_eq!(argmax_unscreened(&mut values, &[0, 1, 2, 3], &screened).unwrap(), 2);
    }

    #[test]
    fn exhausted_candidates_error() {
        let mut values = vec![1.0, 2.0];
        let screened: HashSet<usize> = [4, 5].into_iter().collect();
        assert!(matches!(
            argmax_unscreened(&mut values, &[4, 5], &screened),
            Err(Error::SearchSpaceExhausted)
        ));
    }

    #[test]
    fn select_next_matches_brute_force() {
        let (store, gp, screened) = fitted(4);
        let candidates: Vec<usize> = (0..store.len()).collect();
        let best = gp.best_observed();
        let r = select_next(&gp, &store, &candidates, &screened, best).unwrap();
        let mut oracle = (usize::MAX, f64::NEG_INFINITY);
        for row in 0..store.len() {
            if screened.contains(&row) {
                continue;
            }
            let (mu, var) = gp.posterior(&store.row_f64(row)).unwrap();
            let ei = expected_improvement(mu, var, best);
            if ei > oracle.1 {
                oracle = (row, ei);
            }
        }
        assert_eq!(r.chosen, oracle.0);
        assert!(!screened.contains(&r.chosen));
    }

    #[test]
    fn batch_consistency() {
        let (store, gp, screened) = fitted(6);
        let candidates: Vec<usize> = (0..store.len()).collect();
        let best = gp.best_observed();
        let one = select_batch(&gp, &store, &candidates, &screened, best, 1).unwrap();
        let next = select_next(&gp, &store, &candidates, &screened, best).unwrap();
        assert_eq!(one, vec![next.chosen]);

        let b19 = select_batch(&gp, &store, &candidates, &screened, best, 19).unwrap();
        let mut ranking: Vec<(usize, f64)> = next
            .values
            .iter()
            .copied()
            .enumerate()
            .filter(|(i, _)| !screened.contains(i))
            .collect();
        ranking.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let oracle: Vec<usize> = ranking.iter().take(19).map(|p| p.0).collect();
        assert_eq!(b19, oracle);

        let open = store.len() - screened.len();
        let all = select_batch(&gp, &store, &candidates, &screened, best, open).unwrap();
        assert_eq!(all.len(), open);
        assert!(select_batch(&gp, &store, &candidates, &screened, best, open + 1).is_err());
    }

    proptest! {
        #[test]
        fn ei_non_negative_and_monotone(f_best in -5.0f64..5.0, s in 0.0f64..3.0) {
            let mut prev = 0.0;
            for i in 0..200 {
                let mu = -10.0 + 0.1 * i as f64;
                let ei = expected_improvement(mu, s * s, f_best);
                prop_assert!(ei >= 0.0);
                prop_assert!(ei >= prev - 1e-12 * (1.0 + prev));
                prev = ei;
            }
        }

        #[test]
        fn ei_increases_with_spread_at_the_incumbent(f_best in -5.0f64..5.0) {
            let mut prev = 0.0;
            for i in 1..100 {
                let s = 0.05 * i as f64;
                let ei = expected_improvement(f_best, s * s, f_best);
                prop_assert!(ei > prev);
                prev = ei;
            }
        }
    }
}
