//! Desk-scale landscapes with known optima, defined over an embedding store.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::landscape::{single_mutants, Landscape, LandscapeMeta, Variant};

#[derive(Clone, Debug)]
pub struct PeakSpec {
    /// Peak heights; the first one is the planted global optimum.
    pub heights: Vec<f64>,
    /// Peak width as a multiple of the RMS distance between single-mutant neighbours.
    pub width_factor: f64,
    pub seed: u64,
}

impl Default for PeakSpec {
    fn default() -> Self {
        PeakSpec {
            heights: vec![10.0, 7.0, 6.0, 5.0],
            width_factor: 0.6,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedLandscape {
    pub landscape: Landscape,
    pub optimum: Variant,
    pub centers: Vec<Variant>,
}

/// Sum of Gaussian bumps in embedding space centred on store variants that
/// pairwise differ at every position. Every store variant is measured.
pub fn planted_landscape(store: &EmbeddingStore, spec: &PeakSpec) -> Result<PlantedLandscape> {
    if spec.heights.is_empty() || spec.heights.iter().any(|h| h.is_nan() || *h <= 0.0) {
        return Err(Error::InvalidInput("peak heights must be positive".into()));
    }
    if spec.heights[1..].iter().any(|&h| h >= spec.heights[0]) {
        return Err(Error::InvalidInput("the first peak must be the highest".into()));
    }
    let n = store.variants().first().map_or(0, Variant::len);
    if n == 0 {
        return Err(Error::InvalidInput("empty store".into()));
    }

    let mut sum_sq = 0.0;
    let mut pairs = 0usize;
    for row in 0..store.len().min(50) {
        for p in 0..n {
            for m in single_mutants(store.variant(row), p)? {
                if let Some(other) = store.row_of(&m) {
                    sum_sq += store.sq_dist(row, other);
                    pairs += 1;
                }
            }
        }
    }
    if pairs == 0 {
        return Err(Error::InvalidInput("store contains no single-mutant pairs".into()));
    }
    let width = spec.width_factor * (sum_sq / pairs as f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut centers: Vec<usize> = Vec::new();
    let mut attempts = 0;
    while centers.len() < spec.heights.len() {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidInput("could not place separated peaks".into()));
        }
        let row = rng.gen_range(0..store.len());
        let v = store.variant(row);
        if centers.iter().all(|&c| store.variant(c).hamming(v) == n) {
            centers.push(row);
        }
    }

    let inv = 1.0 / (2.0 * width * width);
    let fitness = |row: usize| -> f64 {
        centers
            .iter()
            .zip(&spec.heights)
            .map(|(&c, h)| h * (-store.sq_dist(row, c) * inv).exp())
            .sum()
    };
    let measured: HashMap<Variant, f64> = (0..store.len())
        .map(|row| (store.variant(row).clone(), fitness(row)))
        .collect();

    let optimum = store.variant(centers[0]).clone();
    let top = measured[&optimum];
    if measured.values().any(|&y| y > top) {
        return Err(Error::InvalidInput(
            "peaks overlap so much that the planted optimum is not global".into(),
        ));
    }
    let meta = LandscapeMeta {
        name: format!("planted-{}", spec.seed),
        n,
        position_labels: (1..=n).map(|p| p.to_string()).collect(),
        wild_type: store.variant(0).clone(),
    };
    Ok(PlantedLandscape {
        landscape: Landscape::new(meta, measured)?,
        optimum,
        centers: centers.iter().map(|&c| store.variant(c).clone()).collect(),
    })
}

/// Variants whose fitness is at least that of every single-mutant neighbour.
pub fn local_optima(landscape: &Landscape) -> Result<Vec<Variant>> {
    let mut out = Vec::new();
    for (v, y) in landscape.sorted_rows() {
        let mut is_peak = true;
        for p in 0..landscape.n() {
            if single_mutants(v, p)?.iter().any(|m| landscape.fitness(m) > y) {
                is_peak = false;
                break;
            }
        }
        if is_peak {
            out.push(v.clone());
        }
    }
    Ok(out)
}
