use serde::{Deserialize, Serialize};

use super::covariance::{cholesky, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::seed::HashStream;
use crate::trials::run_trials;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMaxReport {
    pub k: usize,
    pub t: f64,
    /// Monte Carlo estimate of `P(max_l Y_l ≤ t)`.
    pub probability: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Comparison right-hand side at `δ = 2 - t²/ln k` and `ε` the largest
    /// off-diagonal covariance, when those fall in the admissible window.
    pub slepian: Option<f64>,
}

/// Monte Carlo estimate of `P(max_l Y_l ≤ t)` for `Y ~ N(0, Σ)`; trial `i`
/// draws Box–Muller normals from the hash stream seeded by the trial seed.
pub fn gaussian_max_prob(cov: &CovarianceMatrix, t: f64, trials: u64, seed: u64) -> Result<GaussianMaxReport> {
    let factor = cholesky(cov)?;
    let k = cov.dim();
    let hits = run_trials(trials, seed, |_, s| {
        let mut stream = HashStream::new(s);
        let z: Vec<f64> = (0..k).map(|_| stream.next_normal()).collect();
        let mut y = vec![0.0; k];
        factor.apply(&z, &mut y);
        y.iter().all(|&v| v <= t)
    })?;
    let n = hits.iter().filter(|&&h| h).count() as f64;
    let p = n / trials as f64;
    let slepian = if k >= 2 {
        let delta = 2.0 - t * t / (k as f64).ln();
        let eps = cov.max_off_diagonal().max(0.0);
        slepian_rhs(k, delta, eps, 1.0).ok()
    } else {
        None
    };
    Ok(GaussianMaxReport {
        k,
        t,
        probability: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        slepian,
    })
}

/// `exp(-C_Θ k^{δ/20} / √ln k) + k^{-δ²/(50ε)}` for `k ≥ 2` and
/// `100ε ≤ δ ≤ 1/100`; the second term is `0` at `ε = 0`.
pub fn slepian_rhs(k: usize, delta: f64, eps: f64, c_theta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!("need k >= 2, got {k}")));
    }
    if !(eps >= 0.0 && 100.0 * eps <= delta && delta <= 0.01) {
        return Err(Error::invalid(format!(
            "need 100*eps <= delta <= 1/100, got delta={delta}, eps={eps}"
        )));
    }
    let kf = k as f64;
    let first = (-c_theta * kf.powf(delta / 20.0) / kf.ln().sqrt()).exp();
    let second = if eps == 0.0 {
        0.0
    } else {
        kf.powf(-delta * delta / (50.0 * eps))
    };
    Ok(first + second)
}
