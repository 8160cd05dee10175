//! Per-variant embedding vectors and their on-disk format.
//!
//! Matrix file layout (little-endian): the 8-byte magic `EMBSTOR1`, `u32`
//! row count N, `u32` dimension m, then N·m `f32` values in row-major order.
//! The index file is UTF-8 text with one variant word per line; line i
//! names row i.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::landscape::Variant;

mod pca;
mod synth;

pub use pca::{pca, Pca};
pub use synth::{onehot_store, synth_store};

pub const STORE_MAGIC: &[u8; 8] = b"EMBSTOR1";
const HEADER_LEN: usize = 16;

#[derive(Clone, Debug)]
pub struct EmbeddingStore {
    dim: usize,
    variants: Vec<Variant>,
    matrix: Vec<f32>,
    rows: HashMap<Variant, usize>,
}

impl EmbeddingStore {
    /// Builds a store from row-major data; `matrix.len()` must equal `variants.len() * dim`.
    pub fn new(variants: Vec<Variant>, dim: usize, matrix: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::StoreFormat("dimension must be positive".into()));
        }
        if matrix.len() != variants.len() * dim {
            return Err(Error::StoreFormat(format!(
                "{} values cannot form {} rows of dimension {dim}",
                matrix.len(),
                variants.len()
            )));
        }
        if let Some(bad) = matrix.iter().position(|x| !x.is_finite()) {
            return Err(Error::StoreFormat(format!(
                "non-finite value in row {}",
                bad / dim
            )));
        }
        if let Some(first) = variants.first() {
            if let Some(v) = variants.iter().find(|v| v.len() != first.len()) {
                return Err(Error::StoreFormat(format!(
                    "variant {v} has a different length than {first}"
                )));
            }
        }
        let mut rows = HashMap::with_capacity(variants.len());
        for (i, v) in variants.iter().enumerate() {
            if rows.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVariant(v.word()));
            }
        }
        Ok(EmbeddingStore {
            dim,
            variants,
            matrix,
            rows,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    pub fn variants(&self) -> &[Variant] {
        &self.variants
    }

    pub fn variant(&self, row: usize) -> &Variant {
        &self.variants[row]
    }

    pub fn row_of(&self, v: &Variant) -> Option<usize> {
        self.rows.get(v).copied()
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.matrix[row * self.dim..(row + 1) * self.dim]
    }

    pub fn row_f64(&self, row: usize) -> Vec<f64> {
        self.row(row).iter().map(|&x| f64::from(x)).collect()
    }

    pub fn matrix(&self) -> &[f32] {
        &self.matrix
    }

    /// Squared Euclidean distance between two rows.
    pub fn sq_dist(&self, a: usize, b: usize) -> f64 {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(&x, &y)| {
                let d = f64::from(x) - f64::from(y);
                d * d
            })
            .sum()
    }

    pub fn load(index_path: impl AsRef<Path>, matrix_path: impl AsRef<Path>) -> Result<Self> {
        let index_path = index_path.as_ref();
        let matrix_path = matrix_path.as_ref();
        let text = fs::read_to_string(index_path).map_err(|e| Error::io(index_path, e))?;
        let variants = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                Variant::parse(l.trim()).map_err(|e| Error::parse(index_path, i + 1, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;

        let bytes = fs::read(matrix_path).map_err(|e| Error::io(matrix_path, e))?;
        if bytes.len() < HEADER_LEN || &bytes[..8] != STORE_MAGIC {
            return Err(Error::StoreFormat(format!(
                "{}: missing EMBSTOR1 magic",
                matrix_path.display()
            )));
        }
        let count = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        if count != variants.len() {
            return Err(Error::StoreFormat(format!(
                "index lists {} variants but the matrix header declares {count}",
                variants.len()
            )));
        }
        let expected = HEADER_LEN + count * dim * 4;
        if bytes.len() < expected {
            return Err(Error::StoreFormat(format!(
                "{}: truncated matrix ({} of {expected} bytes)",
                matrix_path.display(),
                bytes.len()
            )));
        }
        if bytes.len() > expected {
            return Err(Error::StoreFormat(format!(
                "{}: {} trailing bytes",
                matrix_path.display(),
                bytes.len() - expected
            )));
        }
        let matrix = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        EmbeddingStore::new(variants, dim, matrix)
    }

    pub fn save(&self, index_path: impl AsRef<Path>, matrix_path: impl AsRef<Path>) -> Result<()> {
        let index_path = index_path.as_ref();
        let matrix_path = matrix_path.as_ref();
        let count = u32::try_from(self.len())
            .map_err(|_| Error::StoreFormat("too many rows for the matrix format".into()))?;
        let dim = u32::try_from(self.dim)
            .map_err(|_| Error::StoreFormat("dimension too large for the matrix format".into()))?;

        let mut index = String::with_capacity(self.len() * (self.variants.first().map_or(0, Variant::len) + 1));
        for v in &self.variants {
            index.push_str(&v.word());
            index.push('\n');
        }
        fs::write(index_path, index).map_err(|e| Error::io(index_path, e))?;

        let mut bytes = Vec::with_capacity(HEADER_LEN + self.matrix.len() * 4);
        bytes.extend_from_slice(STORE_MAGIC);
        bytes.extend_from_slice(&count.to_le_bytes());
        bytes.extend_from_slice(&dim.to_le_bytes());
        for x in &self.matrix {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        fs::write(matrix_path, bytes).map_err(|e| Error::io(matrix_path, e))
    }
}
