use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::EmbeddingStore;
use crate::error::{Error, Result};

/// Principal components of an embedding store.
#[derive(Clone, Debug)]
pub struct Pca {
    /// N×k scores of the mean-centred rows.
    pub projection: DMatrix<f64>,
    /// Fraction of the total variance carried by each component, descending.
    pub explained_variance_ratio: Vec<f64>,
    /// m×k unit component directions.
    pub components: DMatrix<f64>,
}

/// Projects the store onto its first `k` principal components.
///
/// Eigenvectors come from the m×m sample covariance, or from the N×N Gram
/// matrix when there are fewer rows than dimensions. Each component is signed
/// so that its largest-magnitude entry is positive.
pub fn pca(store: &EmbeddingStore, k: usize) -> Result<Pca> {
    let (rows, dim) = (store.len(), store.dim());
    if rows < 2 {
        return Err(Error::InvalidInput("PCA needs at least two rows".into()));
    }
    if k == 0 || k > rows.min(dim) {
        return Err(Error::InvalidInput(format!(
            "k must be in 1..={}, got {k}",
            rows.min(dim)
        )));
    }
    let mut x = DMatrix::from_row_iterator(
        rows,
        dim,
        store.matrix().iter().map(|&v| f64::from(v)),
    );
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }
    let denom = (rows - 1) as f64;

    let total: f64 = x.iter().map(|v| v * v).sum::<f64>() / denom;
    if total <= 0.0 {
        return Ok(Pca {
            projection: DMatrix::zeros(rows, k),
            explained_variance_ratio: vec![0.0; k],
            components: DMatrix::zeros(dim, k),
        });
    }

    let (values, components) = if dim <= rows {
        let cov = (x.transpose() * &x) / denom;
        let (values, vectors) = sorted_eigen(cov);
        (values, vectors.columns(0, k).into_owned())
    } else {
        let gram = (&x * x.transpose()) / denom;
        let (values, vectors) = sorted_eigen(gram);
        let mut comps = DMatrix::zeros(dim, k);
        for j in 0..k {
            let v: DVector<f64> = x.transpose() * vectors.column(j);
            let norm = v.norm();
            if norm > 0.0 && values[j] > 0.0 {
                comps.set_column(j, &(v / norm));
            }
        }
        (values, comps)
    };

    let mut components = components;
    for mut col in components.column_iter_mut() {
        let lead = col
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if lead < 0.0 {
            col.neg_mut();
        }
    }
    let projection = &x * &components;
    let explained_variance_ratio = values[..k].iter().map(|l| l.max(0.0) / total).collect();
    Ok(Pca {
        projection,
        explained_variance_ratio,
        components,
    })
}

fn sorted_eigen(sym: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}
