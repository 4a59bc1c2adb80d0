//! The random user orientation: a normal distribution truncated to `[-π, π]`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::angles::AngularInterval;
use crate::venue::GridPosition;

/// Truncated normal over `[-π, π]`, renormalized. The mean is not wrapped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientationDistribution {
    pub mean: f64,
    pub std: f64,
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

impl OrientationDistribution {
    pub fn new(mean: f64, std: f64) -> Self {
        debug_assert!(std > 0.0);
        Self { mean, std }
    }

    pub fn for_gp(gp: &GridPosition) -> Self {
        Self::new(gp.facing, gp.orientation_std)
    }

    fn raw_cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mean) / self.std)
    }

    fn normalizer(&self) -> f64 {
        self.raw_cdf(PI) - self.raw_cdf(-PI)
    }

    /// CDF of the truncated distribution.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(-PI, PI);
        (self.raw_cdf(x) - self.raw_cdf(-PI)) / self.normalizer()
    }

    /// Probability of the linear segment `[a, b] ⊆ [-π, π]`.
    pub fn segment_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let (a, b) = (a.max(-PI), b.min(PI));
        // upper-tail form keeps precision when both ends sit far right of the mean
        let za = (a - self.mean) / self.std;
        let zb = (b - self.mean) / self.std;
        let raw = if za > 0.0 {
            0.5 * (erfc(za / SQRT_2) - erfc(zb / SQRT_2))
        } else {
            std_normal_cdf(zb) - std_normal_cdf(za)
        };
        (raw / self.normalizer()).max(0.0)
    }

    /// Probability that the orientation lies in `interval`.
    pub fn mass(&self, interval: &AngularInterval) -> f64 {
        if interval.is_full() {
            return 1.0;
        }
        interval
            .segments()
            .into_iter()
            .map(|(a, b)| self.segment_mass(a, b))
            .fold(0.0, |acc, x| acc + x)
    }

    /// Inverse-CDF draw for a uniform variate `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let lo = self.raw_cdf(-PI);
        let hi = self.raw_cdf(PI);
        let p = lo + u * (hi - lo);
        let z = Normal::standard().inverse_cdf(p.clamp(0.0, 1.0));
        (self.mean + self.std * z).clamp(-PI, PI)
    }
}
