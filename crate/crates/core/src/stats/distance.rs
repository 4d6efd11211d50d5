use serde::{Deserialize, Serialize};

use super::normal::normal_quantile;
use crate::error::{Error, Result};

/// Nonempty sample sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample(Vec<f64>);

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("empirical sample is empty"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("empirical sample contains NaN"));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.len() as f64
    }

    /// Quantile by linear interpolation between order statistics.
    pub fn quantile(&self, q: f64) -> f64 {
        let pos = q.clamp(0.0, 1.0) * (self.len() - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 < self.len() {
            self.0[i] * (1.0 - frac) + self.0[i + 1] * frac
        } else {
            self.0[i]
        }
    }
}

/// `sup_i max(|i/T - F(x_(i))|, |(i-1)/T - F(x_(i))|)`.
pub fn kolmogorov_distance(sample: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> f64 {
    let t = sample.len() as f64;
    sample
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let i = i as f64;
            ((i + 1.0) / t - f).abs().max((i / t - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Wasserstein-1 distance to the standard normal by quantile coupling at
/// the levels `(i - 1/2)/T`.
pub fn wasserstein1_normal(sample: &EmpiricalSample) -> f64 {
    let t = sample.len() as f64;
    sample
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let q = normal_quantile((i as f64 + 0.5) / t).expect("level in (0,1)");
            (x - q).abs()
        })
        .sum::<f64>()
        / t
}
