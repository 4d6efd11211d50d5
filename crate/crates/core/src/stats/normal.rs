use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal distribution function, `Φ(x) = erfc(-x/√2) / 2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of [`std_normal_cdf`] by safeguarded Newton iteration.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    let mut q = 0.0;
    for _ in 0..200 {
        let f = std_normal_cdf(q) - p;
        if f == 0.0 {
            return Ok(q);
        }
        if f < 0.0 {
            lo = q;
        } else {
            hi = q;
        }
        let d = std_normal_pdf(q);
        let newton = q - f / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - q).abs() <= 1e-15 * q.abs().max(1.0) || hi - lo <= 1e-15 * q.abs().max(1.0) {
            return Ok(next);
        }
        q = next;
    }
    Ok(q)
}
