use serde::{Deserialize, Serialize};

use super::short::SecondMomentCheck;
use crate::arith::{factor_set, tau3_interval_sum, ArithSet, FactorSieve, PolySpec};
use crate::error::{Error, Result};
use crate::model::{PreparedSet, RmfModel, RmfSample, Twist};
use crate::trials::run_trials;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowVariationParams {
    /// Exponent `c` in `N_l = ⌊e^{l^c}⌋`.
    pub c: f64,
    pub l_max: u64,
    pub grid: usize,
    /// Power `A` in the normalizer `√N_{l+1} / (ln N_{l+1})^A`.
    pub log_power: f64,
}

impl Default for SlowVariationParams {
    fn default() -> Self {
        Self {
            c: 0.5,
            l_max: 40,
            grid: 64,
            log_power: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub l: u64,
    pub n_lo: u64,
    pub n_hi: u64,
    /// Points `N` of the gap at which the increment is evaluated.
    pub grid: Vec<u64>,
    /// Indices in `(N_l, N_{l+1}]` that carry a term; the exact second
    /// moment of the full increment.
    pub surviving: u64,
    /// `Σ τ₃(|P(n)|)` over the gap.
    pub tau3_budget: u64,
    /// `√N_{l+1} / (ln N_{l+1})^A`.
    pub normalizer: f64,
    /// `(τ₃ budget)² / normalizer⁴`.
    pub tail_term: f64,
    /// Per trial, the largest `|increment|` over the grid.
    pub max_increment: Vec<f64>,
    /// Fraction of trials in which the maximum exceeds the normalizer.
    pub exceed_fraction: f64,
    pub second_moment: SecondMomentCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowVariationReport {
    pub params: SlowVariationParams,
    pub gaps: Vec<GapReport>,
}

/// `N_l = ⌊e^{l^c}⌋` for `1 ≤ l ≤ l_max + 1`.
pub fn slow_scales(c: f64, l_max: u64) -> Vec<u64> {
    (1..=l_max + 1).map(|l| (l as f64).powf(c).exp().floor() as u64).collect()
}

/// Increments `Σ_{N_l < n ≤ N} 𝔗f(P(n))` on a grid of each gap.
pub fn run_slow_variation(
    model: RmfModel,
    sieve: &FactorSieve,
    poly: &PolySpec,
    params: &SlowVariationParams,
    twist: Twist,
    trials: u64,
    seed: u64,
) -> Result<SlowVariationReport> {
    twist.check_model(model)?;
    if !(params.c > 0.0 && params.c < 1.0) {
        return Err(Error::invalid(format!("c must lie in (0, 1), got {}", params.c)));
    }
    if params.l_max == 0 || params.grid == 0 {
        return Err(Error::invalid("l_max and grid must be at least 1"));
    }
    let ns = slow_scales(params.c, params.l_max);
    let n_max = *ns.last().unwrap();
    let mut set = ArithSet::poly_image(poly.clone(), n_max);
    if model == RmfModel::Rademacher {
        set = set.squarefree();
    }
    let prepared = PreparedSet::new(model, &factor_set(sieve, &set)?)?;
    let pos = |n: u64| prepared.elements().partition_point(|e| e.index <= n);
    let mut layout = Vec::with_capacity(params.l_max as usize);
    for l in 0..params.l_max as usize {
        let (lo, hi) = (ns[l], ns[l + 1]);
        let gap = hi - lo;
        let mut grid: Vec<u64> = (1..=params.grid as u64)
            .map(|j| lo + (j * gap).div_ceil(params.grid as u64))
            .filter(|&n| n > lo)
            .collect();
        grid.dedup();
        let ends: Vec<usize> = grid.iter().map(|&n| pos(n)).collect();
        layout.push((lo, hi, pos(lo), grid, ends));
    }
    let raw = run_trials(trials, seed, |_, s| {
        let sample = RmfSample::new(model, s);
        let vals: Vec<f64> = prepared.values(&sample).into_iter().map(|z| twist.apply(z)).collect();
        layout
            .iter()
            .map(|(_, _, start, _, ends)| {
                let mut acc = 0.0;
                let mut p = *start;
                let mut max = 0.0f64;
                for &e in ends {
                    while p < e {
                        acc += vals[p];
                        p += 1;
                    }
                    max = max.max(acc.abs());
                }
                (max, acc)
            })
            .collect::<Vec<(f64, f64)>>()
    })?;
    let mut gaps = Vec::with_capacity(layout.len());
    for (l, (lo, hi, start, grid, ends)) in layout.into_iter().enumerate() {
        let surviving = (ends.last().copied().unwrap_or(start) - start) as u64;
        let tau3_budget = if hi > lo { tau3_interval_sum(sieve, poly, lo, hi - lo)? } else { 0 };
        let nh = hi as f64;
        let normalizer = nh.sqrt() / nh.ln().powf(params.log_power);
        let max_increment: Vec<f64> = raw.iter().map(|row| row[l].0).collect();
        let squares: Vec<f64> = raw.iter().map(|row| row[l].1 * row[l].1).collect();
        let exceed_fraction =
            max_increment.iter().filter(|&&m| m > normalizer).count() as f64 / trials as f64;
        gaps.push(GapReport {
            l: l as u64 + 1,
            n_lo: lo,
            n_hi: hi,
            grid,
            surviving,
            tau3_budget,
            normalizer,
            tail_term: (tau3_budget as f64).powi(2) / normalizer.powi(4),
            max_increment,
            exceed_fraction,
            second_moment: SecondMomentCheck::from_squares(surviving as f64, &squares),
        });
    }
    Ok(SlowVariationReport {
        params: params.clone(),
        gaps,
    })
}
