//! Bayesian optimization in protein embedding space for in-silico directed
//! evolution, with classical baselines and an evaluation harness.

pub mod acquisition;
pub mod baselines;
pub mod boes;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod gp;
pub mod landscape;
pub mod synthetic;
pub mod trace;

pub use error::{Error, Result};
