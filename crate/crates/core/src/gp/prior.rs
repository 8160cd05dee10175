use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Zero-mean normal prior on the kernel scale, truncated to `[0, ∞)` and renormalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthScalePrior {
    sigma: f64,
}

impl LengthScalePrior {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "prior sigma must be positive, got {sigma}"
            )));
        }
        Ok(LengthScalePrior { sigma })
    }

    /// `σ = √m / 3`, so the diagonal of a unit box in `m` dimensions sits at about 3σ.
    pub fn for_dim(m: usize) -> Self {
        LengthScalePrior {
            sigma: (m.max(1) as f64).sqrt() / 3.0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn log_density(&self, theta: f64) -> f64 {
        if theta < 0.0 || theta.is_nan() {
            return f64::NEG_INFINITY;
        }
        let z = theta / self.sigma;
        LN_2 - HALF_LN_2PI - self.sigma.ln() - 0.5 * z * z
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.log_density(theta).exp()
    }

    /// Inverse CDF of the truncated normal, `p ∈ [0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let std = Normal::new(0.0, 1.0).expect("standard normal");
        self.sigma * std.inverse_cdf(0.5 + 0.5 * p)
    }

    /// Deterministic start points at the quantiles `i / (count + 1)`, `i = 1..=count`.
    pub fn start_points(&self, count: usize) -> Vec<f64> {
        (1..=count)
            .map(|i| self.quantile(i as f64 / (count + 1) as f64))
            .collect()
    }
}
