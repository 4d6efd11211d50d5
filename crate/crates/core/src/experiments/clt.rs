use serde::{Deserialize, Serialize};

use crate::arith::{factor_set, ArithSet, FactorSieve};
use crate::energy::{
    clt_diagnostics, theorem_bound, BoundConstants, CltDiagnostics, CoefficientVector, CountingSet,
    EquationKind, MomentInputs, DEFAULT_PAIR_BUDGET,
};
use crate::error::{Error, Result};
use crate::model::{PreparedSet, RmfModel, RmfSample, Twist};
use crate::stats::{kolmogorov_distance, std_normal_cdf, wasserstein1_normal, EmpiricalSample};
use crate::trials::run_trials;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltOptions {
    /// Compute `A`, `B` and the bound exactly; skipped per set when the
    /// pair budget would be exceeded.
    pub exact_moments: bool,
    pub budget: u128,
    pub constants: BoundConstants,
}

impl Default for CltOptions {
    fn default() -> Self {
        Self {
            exact_moments: true,
            budget: DEFAULT_PAIR_BUDGET,
            constants: BoundConstants::default(),
        }
    }
}

/// Distances of the empirical law of `S_N` to the standard normal, with
/// the exact moment quantities when available.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub label: String,
    pub size: u64,
    pub mean: f64,
    pub second_moment: f64,
    pub kolmogorov: f64,
    pub wasserstein1: f64,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub bound: Option<f64>,
    pub bracket: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub model: RmfModel,
    pub twist: Twist,
    pub trials: u64,
    pub sets: Vec<SampleSummary>,
    /// `Σ_l S_l/√k` over all sets, with the joint diagnostics, when there
    /// is more than one set.
    pub combined: Option<SampleSummary>,
    pub diagnostics: Option<CltDiagnostics>,
    /// `samples[trial][set]`.
    pub samples: Vec<Vec<f64>>,
}

pub fn summarize(label: String, size: u64, values: Vec<f64>) -> Result<SampleSummary> {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    let second_moment = values.iter().map(|v| v * v).sum::<f64>() / t;
    let sample = EmpiricalSample::new(values)?;
    Ok(SampleSummary {
        label,
        size,
        mean,
        second_moment,
        kolmogorov: kolmogorov_distance(&sample, std_normal_cdf),
        wasserstein1: wasserstein1_normal(&sample),
        a: None,
        b: None,
        bound: None,
        bracket: None,
    })
}

fn exact_moments(
    sets: &[CountingSet],
    kind: EquationKind,
    opts: &CltOptions,
) -> Result<Option<CltDiagnostics>> {
    let inputs = MomentInputs {
        sets,
        kind,
        budget: opts.budget,
    };
    match clt_diagnostics(&inputs, &CoefficientVector::uniform(sets.len())) {
        Ok(d) => Ok(Some(d)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn attach(summary: &mut SampleSummary, diag: &CltDiagnostics, constants: &BoundConstants) {
    let bound = theorem_bound(diag, 0.0, constants);
    summary.a = Some(diag.a);
    summary.b = Some(diag.b);
    summary.bound = Some(bound.bound);
    summary.bracket = Some(bound.bracket);
}

/// Samples `S_N` for every set in each trial and compares each marginal,
/// and the normalized sum of all of them, with the standard normal.
pub fn run_clt_experiment(
    model: RmfModel,
    sieve: &FactorSieve,
    sets: &[ArithSet],
    twist: Twist,
    trials: u64,
    seed: u64,
    opts: &CltOptions,
) -> Result<CltReport> {
    twist.check_model(model)?;
    if sets.is_empty() {
        return Err(Error::invalid("need at least one set"));
    }
    let factored = sets
        .iter()
        .map(|s| factor_set(sieve, s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = factored.iter().position(|f| f.is_empty()) {
        return Err(Error::invalid(format!("set {} is empty", sets[i])));
    }
    let prepared = factored
        .iter()
        .map(|f| PreparedSet::new(model, f))
        .collect::<Result<Vec<_>>>()?;
    let samples = run_trials(trials, seed, |_, s| {
        let sample = RmfSample::new(model, s);
        prepared.iter().map(|p| p.normalized_sum(&sample, twist)).collect::<Vec<f64>>()
    })?;
    let kind = EquationKind::for_model(model);
    let counting: Vec<CountingSet> = if opts.exact_moments {
        factored.iter().map(CountingSet::new).collect()
    } else {
        Vec::new()
    };
    let mut summaries = Vec::with_capacity(sets.len());
    for (i, set) in sets.iter().enumerate() {
        let column = samples.iter().map(|row| row[i]).collect();
        let mut s = summarize(set.to_string(), prepared[i].len() as u64, column)?;
        if opts.exact_moments {
            if let Some(d) = exact_moments(std::slice::from_ref(&counting[i]), kind, opts)? {
                attach(&mut s, &d, &opts.constants);
            }
        }
        summaries.push(s);
    }
    let (combined, diagnostics) = if sets.len() > 1 {
        let k = sets.len() as f64;
        let column = samples.iter().map(|row| row.iter().sum::<f64>() / k.sqrt()).collect();
        let total = prepared.iter().map(|p| p.len() as u64).sum();
        let mut s = summarize("combined".into(), total, column)?;
        let diag = if opts.exact_moments {
            exact_moments(&counting, kind, opts)?
        } else {
            None
        };
        if let Some(d) = &diag {
            attach(&mut s, d, &opts.constants);
        }
        (Some(s), diag)
    } else {
        (None, None)
    };
    Ok(CltReport {
        model,
        twist,
        trials,
        sets: summaries,
        combined,
        diagnostics,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::normal_quantile;

    #[test]
    fn planted_quantiles_through_the_summary() {
        let t = 500;
        let vals = (0..t).map(|i| normal_quantile((i as f64 + 0.5) / t as f64).unwrap()).collect();
        let s = summarize("planted".into(), 1, vals).unwrap();
        assert!(s.kolmogorov <= 0.5 / t as f64 + 1e-12);
    }

    #[test]
    fn single_prime_set_is_a_sign() {
        let sieve = FactorSieve::new(100).unwrap();
        let set = ArithSet::explicit(vec![7]).squarefree();
        let r = run_clt_experiment(RmfModel::Rademacher, &sieve, &[set], Twist::Identity, 200, 3, &CltOptions::default())
            .unwrap();
        assert!(r.samples.iter().all(|row| row[0].abs() == 1.0));
        // The empirical law is q·δ₋₁ + (1-q)·δ₁; the supremum sits at ±1.
        let q = r.samples.iter().filter(|row| row[0] < 0.0).count() as f64 / 200.0;
        let (lo, hi) = (std_normal_cdf(-1.0), std_normal_cdf(1.0));
        let expected = [lo, (q - lo).abs(), (hi - q).abs(), 1.0 - hi].into_iter().fold(0.0, f64::max);
        assert!((r.sets[0].kolmogorov - expected).abs() < 1e-15);
        assert_eq!(r.sets[0].a, Some(1.0));
        assert_eq!(r.sets[0].b, Some(0.0));
    }

    #[test]
    fn rejects_empty_sets_and_bad_twists() {
        let sieve = FactorSieve::new(100).unwrap();
        let empty = ArithSet::explicit(vec![]);
        let opts = CltOptions::default();
        assert!(run_clt_experiment(RmfModel::Rademacher, &sieve, &[empty], Twist::Identity, 5, 1, &opts).is_err());
        let one = ArithSet::explicit(vec![3]);
        assert!(run_clt_experiment(RmfModel::Steinhaus, &sieve, &[one], Twist::Identity, 5, 1, &opts).is_err());
    }
}
