//! Deterministic parallel trial runner.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::trial_seed;

/// Runs `trial(i, seed_i)` for `i in 0..trials` on the current rayon pool,
/// with `seed_i = trial_seed(master, i)`. Results come back in trial order
/// whatever the worker count.
pub fn run_trials<T, F>(trials: u64, master: u64, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    Ok((0..trials)
        .into_par_iter()
        .map(|i| trial(i, trial_seed(master, i)))
        .collect())
}
