//! Counting functions over intervals and polynomial values: `τ₃` sums,
//! smooth-number counts, `Ω`-excess and squarefree-rough counts.

use serde::{Deserialize, Serialize};

use super::poly::PolySpec;
use super::polysieve::factor_poly_range;
use super::sieve::{tau3_prime_power, FactorSieve};
use crate::error::{Error, Result};

/// `Σ τ₃(|Q(n)|)` over `N < n ≤ N + H`.
pub fn tau3_interval_sum(sieve: &FactorSieve, q: &PolySpec, n: u64, h: u64) -> Result<u64> {
    let lo = n + 1;
    let hi = n + h;
    let rf = factor_poly_range(sieve, q, lo, hi)?;
    let mut total = 0u64;
    for (i, &v) in rf.values.iter().enumerate() {
        if v == 0 {
            return Err(Error::invalid(format!("Q({}) = 0", lo + i as u64)));
        }
        total += rf.row(i).map(|(_, a)| tau3_prime_power(a)).product::<u64>();
    }
    Ok(total)
}

/// `#{n ≤ N : P⁺(n) ≤ y}`, counting `n = 1`.
pub fn psi_smooth(sieve: &FactorSieve, n: u64, y: u64) -> Result<u64> {
    if n == 0 {
        return Ok(0);
    }
    sieve.check(n)?;
    Ok((1..=n)
        .filter(|&m| sieve.factors_unchecked(m).last().map_or(1, |f| f.0) <= y)
        .count() as u64)
}

/// Exact smooth-value count together with the comparison curve `N (e/u)^u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothCount {
    pub count: u64,
    /// `N (e/u)^u` with `u = ln N / ln y`; `0` when `y < 2`.
    pub comparison: f64,
}

/// `#{n ≤ N : P(n) is y-smooth}`; requires `P(n) > 0` on `1..=N`.
pub fn psi_poly_smooth(sieve: &FactorSieve, p: &PolySpec, n: u64, y: u64) -> Result<SmoothCount> {
    let rf = factor_poly_range(sieve, p, 1, n)?;
    let mut count = 0;
    for (i, &v) in rf.values.iter().enumerate() {
        if v <= 0 {
            return Err(Error::invalid(format!("P({}) = {v} is not positive", i + 1)));
        }
        if rf.row(i).last().map_or(1, |f| f.0) <= y {
            count += 1;
        }
    }
    Ok(SmoothCount {
        count,
        comparison: smooth_comparison(n, y),
    })
}

fn smooth_comparison(n: u64, y: u64) -> f64 {
    if y < 2 || n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let u = nf.ln() / (y as f64).ln();
    if u == 0.0 {
        return nf;
    }
    nf * (std::f64::consts::E / u).powf(u)
}

fn check_interval(sieve: &FactorSieve, n: u64, h: u64) -> Result<()> {
    if h == 0 || h > n {
        return Err(Error::invalid(format!("need 0 < H <= N, got N={n}, H={h}")));
    }
    sieve.check(n)
}

/// `#{N - H < n ≤ N : Ω(n) > threshold}`.
pub fn count_omega_above(sieve: &FactorSieve, n: u64, h: u64, threshold: f64) -> Result<u64> {
    check_interval(sieve, n, h)?;
    Ok((n - h + 1..=n)
        .filter(|&m| sieve.factors_unchecked(m).map(|f| f.1).sum::<u32>() as f64 > threshold)
        .count() as u64)
}

/// Count of `n` in `(N - H, N]` with `Ω(n) > (1 + ε) ln ln N`, and the
/// exponent `ε' = (1 + ε) ln(1 + ε) - ε` of the matching density bound.
pub fn count_omega_exceed(sieve: &FactorSieve, n: u64, h: u64, eps: f64) -> Result<(u64, f64)> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if (n as f64) <= std::f64::consts::E {
        return Err(Error::invalid(format!("ln ln N is not positive for N = {n}")));
    }
    let threshold = (1.0 + eps) * (n as f64).ln().ln();
    let count = count_omega_above(sieve, n, h, threshold)?;
    Ok((count, (1.0 + eps) * (1.0 + eps).ln() - eps))
}

/// `#{N - H < n ≤ N : n squarefree, P⁺(n) > N^α}`.
pub fn count_squarefree_rough(sieve: &FactorSieve, n: u64, h: u64, alpha: f64) -> Result<u64> {
    check_interval(sieve, n, h)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let floor = (n as f64).powf(alpha);
    let mut count = 0;
    for m in n - h + 1..=n {
        let mut top = 1;
        let mut squarefree = true;
        for (p, a) in sieve.factors_unchecked(m) {
            squarefree &= a == 1;
            top = p;
        }
        if squarefree && top as f64 > floor {
            count += 1;
        }
    }
    Ok(count)
}
