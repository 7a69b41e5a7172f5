//! Gaussian special functions and Monte Carlo summary statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};


const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
    }
}

/// Two-sided normal quantile for a confidence level, e.g. 1.959964 at 0.95.
pub fn two_sided_z(confidence_level: f64) -> f64 {
    let normal = Normal::standard();
    normal.inverse_cdf(1.0 - (1.0 - confidence_level) / 2.0)
}

/// Running mean and centered second moment, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * (self.count as f64) * (other.count as f64) / n;
        self.count += other.count;
    }

    /// Sample variance with Bessel's correction.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn estimate(&self, confidence_level: f64) -> ErrorEstimate {
        ErrorEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            n: self.count,
            confidence_level,
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub confidence_level: f64,
}

impl ErrorEstimate {
    pub const DEFAULT_CONFIDENCE: f64 = 0.95;

    pub fn z(&self) -> f64 {
        two_sided_z(self.confidence_level)
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.z() * self.std_error
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.z() * self.std_error
    }
}
