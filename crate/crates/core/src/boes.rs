//! The embedding-space Bayesian optimization loop.
//!
//! A run starts from a single screened variant (optionally plus `k` random
//! ones), then repeats: fit the GP on every observation, evaluate EI at every
//! variant in the store with screened ones masked to zero, screen the best
//! batch. All screens count towards the budget.

use std::collections::HashSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{expected_improvement, top_unscreened};
use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::gp::{fit, FitObjective, FitOptions, KernelFamily, LengthScalePrior};
use crate::landscape::{Landscape, ScreeningSession, Variant};
use crate::trace::{RunTrace, TraceHeader};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoreKind {
    Embedding,
    Onehot,
    Synthetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    StartOnly,
    /// Screen `k` uniformly drawn variants after the start.
    RandomK(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub budget: usize,
    pub start: Variant,
    pub kernel_family: KernelFamily,
    pub store_kind: StoreKind,
    pub batch: usize,
    pub init: InitStrategy,
    pub fit_objective: FitObjective,
    pub seed: u64,
    /// Add the previous fitted scale as an extra start point.
    pub warm_start: bool,
    pub fit_starts: usize,
    pub rho_end: f64,
    /// Stop once the best observed fitness reaches this value.
    pub stop_at: Option<f64>,
}

impl RunConfig {
    /// Canonical single-variant-batch configuration from a start variant.
    pub fn new(start: Variant, budget: usize) -> Self {
        RunConfig {
            budget,
            start,
            kernel_family: KernelFamily::Matern32Scaled,
            store_kind: StoreKind::Embedding,
            batch: 1,
            init: InitStrategy::StartOnly,
            fit_objective: FitObjective::Map,
            seed: 0,
            warm_start: true,
            fit_starts: 20,
            rho_end: 1e-4,
            stop_at: None,
        }
    }

    /// One-hot ablation: squared-exponential kernel, 20 random initial screens, batches of 19.
    pub fn onehot_ablation(start: Variant, budget: usize, seed: u64) -> Self {
        RunConfig {
            kernel_family: KernelFamily::SquaredExponential,
            store_kind: StoreKind::Onehot,
            batch: 19,
            init: InitStrategy::RandomK(20),
            seed,
            ..RunConfig::new(start, budget)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "budget": self.budget,
            "start": self.start.word(),
            "kernel": self.kernel_family,
            "store": self.store_kind,
            "batch": self.batch,
            "init": self.init,
            "fit_objective": self.fit_objective,
            "warm_start": self.warm_start,
            "fit_starts": self.fit_starts,
            "rho_end": self.rho_end,
            "stop_at": self.stop_at,
        })
    }

    fn fit_options(&self, previous_theta: Option<f64>) -> FitOptions {
        FitOptions {
            family: self.kernel_family,
            objective: self.fit_objective,
            starts: self.fit_starts,
            rho_end: self.rho_end,
            extra_starts: previous_theta
                .filter(|_| self.warm_start)
                .into_iter()
                .collect(),
            ..FitOptions::default()
        }
    }
}

/// Euclidean distances from every store row to each observation, one column per observation.
struct DistanceCache<'s> {
    store: &'s EmbeddingStore,
    columns: Vec<Vec<f64>>,
}

impl<'s> DistanceCache<'s> {
    fn new(store: &'s EmbeddingStore) -> Self {
        DistanceCache {
            store,
            columns: Vec::new(),
        }
    }

    fn push(&mut self, row: usize) {
        let col = (0..self.store.len())
            .map(|i| self.store.sq_dist(i, row).sqrt())
            .collect();
        self.columns.push(col);
    }

    fn distances_from(&self, row: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.columns.iter().map(|c| c[row]));
    }
}

struct Observations<'s> {
    rows: Vec<usize>,
    y: Vec<f64>,
    screened: HashSet<usize>,
    cache: DistanceCache<'s>,
}

impl<'s> Observations<'s> {
    fn screen(
        &mut self,
        session: &mut ScreeningSession<'_>,
        store: &EmbeddingStore,
        row: usize,
        theta: Option<f64>,
    ) -> Result<()> {
        let y = session.screen_with_theta(store.variant(row), theta)?;
        self.rows.push(row);
        self.y.push(y);
        self.screened.insert(row);
        self.cache.push(row);
        Ok(())
    }
}

fn reached(session: &ScreeningSession<'_>, stop_at: Option<f64>) -> bool {
    matches!((session.best(), stop_at), (Some(b), Some(t)) if b >= t)
}

/// Runs the optimization loop until the budget is spent or every variant in the store is screened.
pub fn run_boes(config: &RunConfig, landscape: &Landscape, store: &EmbeddingStore) -> Result<RunTrace> {
    if config.batch == 0 {
        return Err(Error::InvalidInput("batch size must be positive".into()));
    }
    if store.variants().first().map(Variant::len) != Some(landscape.n()) {
        return Err(Error::InvalidInput(format!(
            "store variants do not have {} residues",
            landscape.n()
        )));
    }
    let start_row = store
        .row_of(&config.start)
        .ok_or_else(|| Error::MissingEmbedding(config.start.word()))?;
    let header = TraceHeader::new("boes", config.seed, config.to_json());
    let mut session = ScreeningSession::new(landscape, config.budget, header)?;
    let mut obs = Observations {
        rows: Vec::with_capacity(config.budget),
        y: Vec::with_capacity(config.budget),
        screened: HashSet::with_capacity(config.budget),
        cache: DistanceCache::new(store),
    };

    obs.screen(&mut session, store, start_row, None)?;

    if let InitStrategy::RandomK(k) = config.init {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let draw = (k + 1).min(store.len());
        let picks = index::sample(&mut rng, store.len(), draw);
        for row in picks.iter().filter(|&r| r != start_row).take(k) {
            if session.is_exhausted() {
                break;
            }
            obs.screen(&mut session, store, row, None)?;
        }
    }

    let prior = LengthScalePrior::for_dim(store.dim());
    let candidates: Vec<usize> = (0..store.len()).collect();
    let mut previous_theta = None;
    let mut dists = Vec::with_capacity(config.budget);
    let mut values = vec![0.0; store.len()];

    while !session.is_exhausted()
        && obs.screened.len() < store.len()
        && !reached(&session, config.stop_at)
    {
        let x: Vec<Vec<f64>> = obs.rows.iter().map(|&r| store.row_f64(r)).collect();
        let gp = fit(&x, &obs.y, &prior, &config.fit_options(previous_theta))?;
        let theta = gp.theta();
        previous_theta = Some(theta);
        let f_best = gp.best_observed();

        for (row, value) in values.iter_mut().enumerate() {
            *value = if obs.screened.contains(&row) {
                0.0
            } else {
                obs.cache.distances_from(row, &mut dists);
                let (mu, var) = gp.posterior_from_distances(&dists);
                expected_improvement(mu, var, f_best)
            };
        }
        let open = store.len() - obs.screened.len();
        let q = config.batch.min(session.remaining()).min(open);
        let picks = top_unscreened(&mut values, &candidates, &obs.screened, q)?;
        for row in picks {
            obs.screen(&mut session, store, row, Some(theta))?;
        }
    }
    Ok(session.into_trace())
}
