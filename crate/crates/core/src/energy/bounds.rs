//! Closed-form error bounds of the approximate-Gaussianity statements.
//! Implied constants are explicit multipliers defaulting to 1.

use serde::{Deserialize, Serialize};

use super::CltDiagnostics;
use crate::error::{Error, Result};
use crate::stats::std_normal_cdf;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// Multiplier of the unconditional Kolmogorov bound.
    pub theorem: f64,
    /// Multiplier of the conditional Kolmogorov bound.
    pub conditional: f64,
    /// Multiplier of the exceptional probability in the conditional bound.
    pub prob_defect: f64,
    /// Multiplier of the normal-comparison error terms.
    pub comparison: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            theorem: 1.0,
            conditional: 1.0,
            prob_defect: 1.0,
            comparison: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub bound: f64,
    pub bracket: f64,
}

fn decay(x: f64) -> f64 {
    1.0 + x.abs().powf(16.0 / 5.0)
}

fn one_minus(iii_b: bool) -> f64 {
    if iii_b {
        0.0
    } else {
        1.0
    }
}

/// `C (ε₂ + k²(ε₁ + ε₁′) + (1 - 1_disjoint)(k²ε₂ + k·maxRatio))^{1/5} / (1 + |x|^{16/5})`.
pub fn theorem_bound(diag: &CltDiagnostics, x: f64, constants: &BoundConstants) -> BoundValue {
    let k = diag.k as f64;
    let bracket = diag.eps2
        + k * k * (diag.eps1 + diag.eps1prime)
        + one_minus(diag.iii_b) * (k * k * diag.eps2 + k * diag.max_ratio);
    BoundValue {
        bound: constants.theorem * bracket.powf(0.2) / decay(x),
        bracket,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalInputs {
    pub eps1prime: f64,
    pub eps2: f64,
    pub k: usize,
    pub iii_b: bool,
    pub max_ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalBound {
    /// Probability, over the small primes, that the conditional bound fails.
    pub prob_defect: f64,
    pub kolmogorov_bound: f64,
}

/// Conditional bound given the values at primes up to the threshold.
pub fn conditional_bound(inp: &ConditionalInputs, x: f64, constants: &BoundConstants) -> ConditionalBound {
    let k = inp.k as f64;
    let core = k * (inp.eps1prime + inp.eps2).sqrt();
    ConditionalBound {
        prob_defect: constants.prob_defect
            * (core + one_minus(inp.iii_b) * k * inp.max_ratio * core.powf(1.0 / 12.0)),
        kolmogorov_bound: constants.conditional * core.powf(0.1) / decay(x),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBound {
    /// `k^{3/2} η⁻¹ (k²(ε₁ + ε₁′ + ε₂) + k·maxRatio)^{1/(5(k+1))}`.
    pub unconditional: f64,
    /// `k^{3/2} η⁻¹ (k√(ε₁′ + ε₂))^{1/(10(k+1))}`.
    pub conditional: f64,
    /// `Φ(t + η)^k`, the Gaussian term for independent coordinates.
    pub independent_reference: f64,
}

pub fn normal_comparison_bound(
    diag: &CltDiagnostics,
    t: f64,
    eta: f64,
    constants: &BoundConstants,
) -> Result<ComparisonBound> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    let k = diag.k as f64;
    let pre = constants.comparison * k.powf(1.5) / eta;
    let unc = k * k * (diag.eps1 + diag.eps1prime + diag.eps2) + k * diag.max_ratio;
    let cond = k * (diag.eps1prime + diag.eps2).sqrt();
    Ok(ComparisonBound {
        unconditional: pre * unc.powf(1.0 / (5.0 * (k + 1.0))),
        conditional: pre * cond.powf(1.0 / (10.0 * (k + 1.0))),
        independent_reference: std_normal_cdf(t + eta).powi(diag.k as i32),
    })
}
