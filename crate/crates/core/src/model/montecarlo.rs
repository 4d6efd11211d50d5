use super::{PreparedSet, RmfModel, RmfSample, Twist};
use crate::arith::{ArithSet, FactorSieve};
use crate::error::{Error, Result};
use crate::trials::run_trials;

/// Realizations of `S_N` over a prepared set.
pub fn monte_carlo_prepared(prepared: &PreparedSet, twist: Twist, trials: u64, master: u64) -> Result<Vec<f64>> {
    twist.check_model(prepared.model())?;
    if prepared.is_empty() {
        return Err(Error::invalid("normalized sum over an empty set"));
    }
    let model = prepared.model();
    run_trials(trials, master, |_, seed| {
        prepared.normalized_sum(&RmfSample::new(model, seed), twist)
    })
}

/// Realizations of `S_N`, trial `i` drawn with seed `trial_seed(master, i)`.
pub fn monte_carlo_sums(
    model: RmfModel,
    sieve: &FactorSieve,
    set: &ArithSet,
    twist: Twist,
    trials: u64,
    master: u64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let prepared = PreparedSet::from_set(model, sieve, set)?;
    monte_carlo_prepared(&prepared, twist, trials, master)
}
