//! Gaussian-process surrogate over embeddings.
//!
//! The model has zero prior mean, unit signal variance and no observation
//! noise; a small diagonal jitter keeps the kernel matrix positive definite.
//! Its only hyperparameter is the kernel scale `θ`, fitted by multi-start
//! derivative-free maximization of the log marginal likelihood, optionally
//! plus the log density of a truncated-normal prior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod kernel;
mod linalg;
mod prior;
mod search;

pub use kernel::{distance, euclidean, kernel, KernelFamily, KernelSpec};
pub use prior::LengthScalePrior;

use linalg::{backward_solve, cholesky_in_place, forward_solve};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest jitter tried before a factorization is declared failed.
pub const MAX_JITTER: f64 = 1e-2;

/// `1e-8·(1 + max diagonal)`; every kernel here has unit diagonal.
pub fn default_jitter() -> f64 {
    1e-8 * (1.0 + 1.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitObjective {
    /// Log marginal likelihood plus log prior density.
    #[default]
    Map,
    /// Log marginal likelihood alone, searched over `θ ≥ 0`.
    Mle,
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub family: KernelFamily,
    pub objective: FitObjective,
    /// Number of prior-quantile start points.
    pub starts: usize,
    /// Final trust-region radius of each local search.
    pub rho_end: f64,
    /// Initial radius; defaults to a tenth of the prior's sigma.
    pub rho_beg: Option<f64>,
    /// Upper bound of the search; defaults to 100·sigma.
    pub upper: Option<f64>,
    /// Starting jitter; defaults to [`default_jitter`].
    pub jitter: Option<f64>,
    /// Additional start points, e.g. the previous optimum.
    pub extra_starts: Vec<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            family: KernelFamily::Matern32Scaled,
            objective: FitObjective::Map,
            starts: 20,
            rho_end: 1e-4,
            rho_beg: None,
            upper: None,
            jitter: None,
            extra_starts: Vec::new(),
        }
    }
}

struct Factor {
    chol: Vec<f64>,
    alpha: Vec<f64>,
    jitter: f64,
    lml: f64,
}

/// Factorizes `K + jitter·I` built from a row-major matrix of unscaled distances.
fn factorize(dist: &[f64], y: &[f64], spec: &KernelSpec, jitter: f64) -> Option<Factor> {
    let t = y.len();
    let mut a = vec![0.0; t * t];
    for i in 0..t {
        for j in 0..i {
            a[i * t + j] = spec.of_euclidean(dist[i * t + j]);
        }
        a[i * t + i] = 1.0 + jitter;
    }
    if !cholesky_in_place(&mut a, t) {
        return None;
    }
    let mut alpha = y.to_vec();
    forward_solve(&a, t, &mut alpha);
    let quad: f64 = alpha.iter().map(|v| v * v).sum();
    backward_solve(&a, t, &mut alpha);
    let log_det_half: f64 = (0..t).map(|i| a[i * t + i].ln()).sum();
    let lml = -0.5 * quad - log_det_half - t as f64 * HALF_LN_2PI;
    Some(Factor {
        chol: a,
        alpha,
        jitter,
        lml,
    })
}

/// Tries `jitter, 10·jitter, …` up to [`MAX_JITTER`].
fn factorize_escalating(dist: &[f64], y: &[f64], spec: &KernelSpec, jitter: f64) -> Result<Factor> {
    let mut j = jitter;
    loop {
        if let Some(f) = factorize(dist, y, spec, j) {
            return Ok(f);
        }
        if j >= MAX_JITTER {
            return Err(Error::NotPositiveDefinite { jitter: j });
        }
        j = (j * 10.0).min(MAX_JITTER);
    }
}

fn flatten(embeddings: &[Vec<f64>], y: &[f64]) -> Result<(usize, Vec<f64>)> {
    if embeddings.is_empty() {
        return Err(Error::InvalidInput("need at least one observation".into()));
    }
    if embeddings.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} embeddings but {} observations",
            embeddings.len(),
            y.len()
        )));
    }
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite observation {v}")));
    }
    let dim = embeddings[0].len();
    let mut flat = Vec::with_capacity(dim * embeddings.len());
    for e in embeddings {
        if e.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: e.len(),
            });
        }
        flat.extend_from_slice(e);
    }
    Ok((dim, flat))
}

fn distance_matrix(x: &[f64], dim: usize, order: &[usize]) -> Vec<f64> {
    let t = order.len();
    let mut d = vec![0.0; t * t];
    for a in 0..t {
        let ea = &x[order[a] * dim..(order[a] + 1) * dim];
        for b in 0..a {
            let eb = &x[order[b] * dim..(order[b] + 1) * dim];
            let r = kernel::sq_euclidean(ea, eb).sqrt();
            d[a * t + b] = r;
            d[b * t + a] = r;
        }
    }
    d
}

/// `−½ yᵀ(K+jI)⁻¹y − ½ log det(K+jI) − (t/2) log 2π`, via Cholesky.
pub fn log_marginal_likelihood(
    embeddings: &[Vec<f64>],
    y: &[f64],
    spec: &KernelSpec,
    jitter: f64,
) -> Result<f64> {
    let (dim, x) = flatten(embeddings, y)?;
    let order: Vec<usize> = (0..y.len()).collect();
    let dist = distance_matrix(&x, dim, &order);
    factorize(&dist, y, spec, jitter)
        .map(|f| f.lml)
        .ok_or(Error::NotPositiveDefinite { jitter })
}

/// A GP conditioned on a set of observations with a fixed kernel.
#[derive(Clone, Debug)]
pub struct FittedGP {
    dim: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    kernel: KernelSpec,
    jitter: f64,
    chol: Vec<f64>,
    alpha: Vec<f64>,
    lml: f64,
    objective: f64,
}

impl FittedGP {
    /// Conditions on observations with kernel `spec`, escalating jitter if needed.
    pub fn condition(
        embeddings: &[Vec<f64>],
        y: &[f64],
        spec: KernelSpec,
        jitter: Option<f64>,
    ) -> Result<Self> {
        let (dim, x) = flatten(embeddings, y)?;
        let order: Vec<usize> = (0..y.len()).collect();
        let dist = distance_matrix(&x, dim, &order);
        let f = factorize_escalating(&dist, y, &spec, jitter.unwrap_or_else(default_jitter))?;
        Ok(FittedGP {
            dim,
            x,
            y: y.to_vec(),
            kernel: spec,
            jitter: f.jitter,
            chol: f.chol,
            alpha: f.alpha,
            lml: f.lml,
            objective: f.lml,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn theta(&self) -> f64 {
        self.kernel.theta
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn observations(&self) -> &[f64] {
        &self.y
    }

    /// Row-major lower Cholesky factor of `K + jitter·I`.
    pub fn cholesky(&self) -> &[f64] {
        &self.chol
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    /// Value of the fitting objective at the fitted scale.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn best_observed(&self) -> f64 {
        self.y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Posterior mean and variance at `e`.
    pub fn posterior(&self, e: &[f64]) -> Result<(f64, f64)> {
        if e.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: e.len(),
            });
        }
        let dists: Vec<f64> = self
            .x
            .chunks_exact(self.dim)
            .map(|row| kernel::sq_euclidean(row, e).sqrt())
            .collect();
        Ok(self.posterior_from_distances(&dists))
    }

    /// Posterior from the unscaled Euclidean distances to each observation,
    /// in observation order.
    pub fn posterior_from_distances(&self, dists: &[f64]) -> (f64, f64) {
        debug_assert_eq!(dists.len(), self.y.len());
        let mut k: Vec<f64> = dists.iter().map(|&r| self.kernel.of_euclidean(r)).collect();
        let mu: f64 = k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        forward_solve(&self.chol, self.y.len(), &mut k);
        let explained: f64 = k.iter().map(|v| v * v).sum();
        (mu, (1.0 - explained).max(0.0))
    }
}

/// Fits the kernel scale and conditions the GP on the observations.
///
/// Each start point seeds a bounded local search with final radius
/// `rho_end`; the best objective wins and ties go to the smaller scale.
/// Observations are put in a canonical order for the search, so the fitted
/// scale does not depend on the order they are passed in.
pub fn fit(
    embeddings: &[Vec<f64>],
    y: &[f64],
    prior: &LengthScalePrior,
    opts: &FitOptions,
) -> Result<FittedGP> {
    let (dim, x) = flatten(embeddings, y)?;
    let t = y.len();
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| {
        y[a].total_cmp(&y[b]).then_with(|| {
            let (ea, eb) = (&x[a * dim..(a + 1) * dim], &x[b * dim..(b + 1) * dim]);
            ea.iter()
                .zip(eb)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let y_sorted: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let dist = distance_matrix(&x, dim, &order);
    let jitter = opts.jitter.unwrap_or_else(default_jitter);

    let objective = |theta: f64| -> f64 {
        let spec = KernelSpec {
            family: opts.family,
            theta,
        };
        match factorize_escalating(&dist, &y_sorted, &spec, jitter) {
            Ok(f) => match opts.objective {
                FitObjective::Map => f.lml + prior.log_density(theta),
                FitObjective::Mle => f.lml,
            },
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let sigma = prior.sigma();
    let upper = opts.upper.unwrap_or(100.0 * sigma);
    let rho_beg = opts.rho_beg.unwrap_or(0.1 * sigma);
    let mut starts = prior.start_points(opts.starts);
    starts.extend(
        opts.extra_starts
            .iter()
            .copied()
            .filter(|s| s.is_finite() && *s >= 0.0),
    );
    if starts.is_empty() {
        starts.push(prior.quantile(0.5));
    }

    let mut best: Option<(f64, f64)> = None;
    for &s in &starts {
        let (theta, value) =
            search::maximize_scalar(&objective, s, 0.0, upper, rho_beg, opts.rho_end);
        let better = match best {
            None => true,
            Some((bt, bv)) => value > bv || (value == bv && theta < bt),
        };
        if better {
            best = Some((theta, value));
        }
    }
    let (theta, value) = best.expect("at least one start");
    if value == f64::NEG_INFINITY {
        return Err(Error::NotPositiveDefinite { jitter: MAX_JITTER });
    }

    let spec = KernelSpec {
        family: opts.family,
        theta,
    };
    let mut gp = FittedGP::condition(embeddings, y, spec, Some(jitter))?;
    gp.objective = value;
    Ok(gp)
}
