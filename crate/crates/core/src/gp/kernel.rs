use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `exp(-√3 d)(1 + √3 d)`.
    Matern32Scaled,
    /// `exp(-d²/2)`.
    SquaredExponential,
}

/// Stationary kernel over embeddings with a single scale hyperparameter.
///
/// The scaled distance is `d(e, e') = θ·‖e − e'‖₂`, so `θ` acts as an
/// inverse length scale: larger values decorrelate points faster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub theta: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "kernel scale must be finite and non-negative, got {theta}"
            )));
        }
        Ok(KernelSpec { family, theta })
    }

    /// Kernel value for a given scaled distance `d`.
    pub fn of_scaled_distance(&self, d: f64) -> f64 {
        match self.family {
            KernelFamily::Matern32Scaled => {
                let s = SQRT_3 * d;
                (-s).exp() * (1.0 + s)
            }
            KernelFamily::SquaredExponential => (-0.5 * d * d).exp(),
        }
    }

    /// Kernel value from an unscaled Euclidean distance `r = ‖e − e'‖₂`.
    #[inline]
    pub fn of_euclidean(&self, r: f64) -> f64 {
        self.of_scaled_distance(self.theta * r)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(sq_euclidean(a, b).sqrt())
}

#[inline]
pub(crate) fn sq_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Scaled distance `√((e−e')ᵀ(I·θ²)(e−e')) = θ‖e − e'‖₂`.
pub fn distance(a: &[f64], b: &[f64], theta: f64) -> Result<f64> {
    Ok(theta * euclidean(a, b)?)
}

pub fn kernel(a: &[f64], b: &[f64], spec: &KernelSpec) -> Result<f64> {
    Ok(spec.of_scaled_distance(distance(a, b, spec.theta)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0], 1.0).unwrap(), 5.0);
        assert_eq!(distance(&[1.5, -2.0], &[1.5, -2.0], 7.0).unwrap(), 0.0);
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0], 2.0).unwrap(), 10.0);
        assert!(distance(&[0.0], &[0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn kernel_at_zero_distance() {
        for family in [KernelFamily::Matern32Scaled, KernelFamily::SquaredExponential] {
            let spec = KernelSpec::new(family, 0.7).unwrap();
            assert_eq!(kernel(&[1.0, 2.0], &[1.0, 2.0], &spec).unwrap(), 1.0);
        }
    }

    #[test]
    fn matern_at_inverse_sqrt3() {
        // d = 1/√3 gives exp(-1)·2
        let spec = KernelSpec::new(KernelFamily::Matern32Scaled, 1.0).unwrap();
        let d = 1.0 / 3f64.sqrt();
        let expected = 2.0 * (-1.0f64).exp();
        assert!((spec.of_scaled_distance(d) - expected).abs() < 1e-15);
        assert!((expected - 0.735_758_882_342_884_6).abs() < 1e-15);
    }

    #[test]
    fn kernels_strictly_decrease_on_grid() {
        for family in [KernelFamily::Matern32Scaled, KernelFamily::SquaredExponential] {
            let spec = KernelSpec::new(family, 1.0).unwrap();
            let values: Vec<f64> = (0..=500)
                .map(|i| spec.of_scaled_distance(i as f64 * 0.01))
                .collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]), "{family:?}");
            assert!(values.iter().all(|&k| k > 0.0 && k <= 1.0));
        }
    }

    #[test]
    fn zero_scale_is_constant() {
        let spec = KernelSpec::new(KernelFamily::Matern32Scaled, 0.0).unwrap();
        assert_eq!(kernel(&[0.0, 0.0], &[100.0, -3.0], &spec).unwrap(), 1.0);
        assert!(KernelSpec::new(KernelFamily::Matern32Scaled, -1.0).is_err());
    }
}
