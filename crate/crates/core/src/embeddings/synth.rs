use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::EmbeddingStore;
use crate::error::{Error, Result};
use crate::landscape::{Variant, ALPHABET};

/// Synthetic embeddings built from per-(position, residue) latent vectors.
///
/// The embedding of `v` is `(1/√n) Σ_p b(p, v_p)` where every `b(p, a)` is a
/// standard-normal vector drawn from its own ChaCha stream `p·20 + a` under
/// `seed`, so a vector depends only on `(seed, p, a, dim)`. Values are rounded
/// to `f32`, the store's on-disk precision.
pub fn synth_store(variants: &[Variant], dim: usize, seed: u64) -> Result<EmbeddingStore> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "synthetic embeddings need dim >= 2, got {dim}"
        )));
    }
    let n = variants.first().map_or(0, Variant::len);
    let latent: Vec<Vec<f64>> = (0..n * ALPHABET.len())
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream as u64);
            (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
        })
        .collect();
    let scale = 1.0 / (n.max(1) as f64).sqrt();

    let mut matrix = Vec::with_capacity(variants.len() * dim);
    let mut acc = vec![0.0f64; dim];
    for v in variants {
        if v.len() != n {
            return Err(Error::InvalidVariant {
                word: v.word(),
                reason: format!("expected {n} residues"),
            });
        }
        acc.iter_mut().for_each(|x| *x = 0.0);
        for (p, &code) in v.codes().iter().enumerate() {
            let b = &latent[p * ALPHABET.len() + code as usize];
            acc.iter_mut().zip(b).for_each(|(a, x)| *a += x);
        }
        matrix.extend(acc.iter().map(|x| (x * scale) as f32));
    }
    EmbeddingStore::new(variants.to_vec(), dim, matrix)
}

/// One-hot encoding of the residues: `20·n` columns, one hot entry per position.
pub fn onehot_store(variants: &[Variant]) -> Result<EmbeddingStore> {
    let n = variants.first().map_or(1, Variant::len);
    let dim = ALPHABET.len() * n;
    let mut matrix = vec![0.0f32; variants.len() * dim];
    for (row, v) in variants.iter().enumerate() {
        if v.len() != n {
            return Err(Error::InvalidVariant {
                word: v.word(),
                reason: format!("expected {n} residues"),
            });
        }
        for (p, &code) in v.codes().iter().enumerate() {
            matrix[row * dim + p * ALPHABET.len() + code as usize] = 1.0;
        }
    }
    EmbeddingStore::new(variants.to_vec(), dim, matrix)
}
