use serde::{Deserialize, Serialize};

use super::report::{mean_and_se, FluctuationReport};
use super::scales::ShortScales;
use crate::arith::{factor_set, FactorSieve};
use crate::error::{Error, Result};
use crate::model::{PreparedSet, RmfModel, RmfSample, Twist};
use crate::trials::run_trials;

/// Monte Carlo estimate of `E X²` next to its exact value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentCheck {
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
}

impl SecondMomentCheck {
    pub(crate) fn from_squares(exact: f64, squares: &[f64]) -> Self {
        let (estimate, std_error) = mean_and_se(squares);
        Self {
            exact,
            estimate,
            std_error,
        }
    }

    /// `|estimate - exact| ≤ z·SE`, with an absolute floor for the
    /// degenerate zero-variance case.
    pub fn within(&self, z: f64) -> bool {
        (self.estimate - self.exact).abs() <= z * self.std_error.max(1e-12)
    }
}

/// How the interval at one scale splits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortScaleParts {
    pub prime: u64,
    pub n: u64,
    pub h: u64,
    /// `|A_{N_l}|`: all of the interval (squarefree part for Rademacher).
    pub interval: u64,
    /// `|B_{N_l}|`: top prime above the floor and `Ω` within the ceiling.
    pub pruned: u64,
    /// Top prime at most the floor.
    pub smooth: u64,
    /// Top prime above the floor but `Ω` above the ceiling.
    pub omega_excess: u64,
    pub pruned_second_moment: SecondMomentCheck,
    pub smooth_second_moment: SecondMomentCheck,
    pub omega_second_moment: SecondMomentCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortFluctuationReport {
    pub scales: ShortScales,
    pub parts: Vec<ShortScaleParts>,
    /// Maxima of the pruned-set sums `S̃_{N_l}`.
    pub fluctuation: FluctuationReport,
    /// `smooth[trial][l]`, normalized by `√H_l`.
    pub smooth: Vec<Vec<f64>>,
    /// `omega_excess[trial][l]`, normalized by `√H_l`.
    pub omega_excess: Vec<Vec<f64>>,
    /// `(ln ln X)^{1/3}`.
    pub good_threshold: f64,
    /// Number of good scales in each trial.
    pub good_counts: Vec<usize>,
    /// Fraction of trials with at least `k/2` good scales.
    pub good_fraction: f64,
}

const PRUNED: u8 = 0;
const SMOOTH: u8 = 1;
const OMEGA: u8 = 2;

/// Splits each interval into the pruned set, the smooth part and the
/// `Ω`-excess part and samples the three sums per scale.
pub fn run_short_fluctuation(
    model: RmfModel,
    sieve: &FactorSieve,
    scales: &ShortScales,
    twist: Twist,
    trials: u64,
    seed: u64,
) -> Result<ShortFluctuationReport> {
    twist.check_model(model)?;
    let k = scales.scales.len();
    let mut prepared = Vec::with_capacity(k);
    let mut labels = Vec::with_capacity(k);
    for i in 0..k {
        let full = factor_set(sieve, &scales.interval_set(i, model))?;
        let label: Vec<u8> = (0..full.len())
            .map(|j| {
                if full.top_prime(j) <= scales.top_prime_floor {
                    SMOOTH
                } else if scales.omega_ceiling.is_some_and(|c| full.omega(j) > c) {
                    OMEGA
                } else {
                    PRUNED
                }
            })
            .collect();
        prepared.push(PreparedSet::new(model, &full)?);
        labels.push(label);
    }
    let count = |i: usize, tag: u8| labels[i].iter().filter(|&&t| t == tag).count() as u64;
    if (0..k).any(|i| count(i, PRUNED) == 0) {
        return Err(Error::invalid(format!(
            "a pruned set is empty: the top-prime floor {} leaves nothing below N = {}; increase X or lower delta",
            scales.top_prime_floor,
            scales.max_n()
        )));
    }
    // Raw sums per trial: [l][part].
    let raw = run_trials(trials, seed, |_, s| {
        let sample = RmfSample::new(model, s);
        (0..k)
            .map(|i| {
                let mut acc = [0.0f64; 3];
                for (z, &t) in prepared[i].values(&sample).into_iter().zip(&labels[i]) {
                    acc[t as usize] += twist.apply(z);
                }
                acc
            })
            .collect::<Vec<[f64; 3]>>()
    })?;
    let good_threshold = (scales.x as f64).ln().ln().cbrt();
    let mut parts = Vec::with_capacity(k);
    for (i, s) in scales.scales.iter().enumerate() {
        let check = |tag: u8| {
            let sq: Vec<f64> = raw.iter().map(|row| row[i][tag as usize].powi(2)).collect();
            SecondMomentCheck::from_squares(count(i, tag) as f64, &sq)
        };
        parts.push(ShortScaleParts {
            prime: s.prime,
            n: s.n,
            h: s.h,
            interval: prepared[i].len() as u64,
            pruned: count(i, PRUNED),
            smooth: count(i, SMOOTH),
            omega_excess: count(i, OMEGA),
            pruned_second_moment: check(PRUNED),
            smooth_second_moment: check(SMOOTH),
            omega_second_moment: check(OMEGA),
        });
    }
    let norm_h: Vec<f64> = scales.scales.iter().map(|s| (s.h as f64).sqrt()).collect();
    let pruned_sums = raw
        .iter()
        .map(|row| (0..k).map(|i| row[i][0] / (parts[i].pruned as f64).sqrt()).collect())
        .collect();
    let smooth: Vec<Vec<f64>> = raw
        .iter()
        .map(|row| (0..k).map(|i| row[i][1] / norm_h[i]).collect())
        .collect();
    let omega_excess = raw
        .iter()
        .map(|row| (0..k).map(|i| row[i][2] / norm_h[i]).collect())
        .collect();
    let good_counts: Vec<usize> = smooth
        .iter()
        .map(|row| row.iter().filter(|v| v.abs() <= good_threshold).count())
        .collect();
    let good_fraction =
        good_counts.iter().filter(|&&g| 2 * g >= k).count() as f64 / trials as f64;
    let xf = scales.x as f64;
    let fluctuation = FluctuationReport::from_sums(
        scales.scales.iter().map(|s| s.n).collect(),
        parts.iter().map(|p| p.pruned).collect(),
        pruned_sums,
        (xf / scales.hspec.eval(xf)).ln().sqrt(),
    );
    Ok(ShortFluctuationReport {
        scales: scales.clone(),
        parts,
        fluctuation,
        smooth,
        omega_excess,
        good_threshold,
        good_counts,
        good_fraction,
    })
}
