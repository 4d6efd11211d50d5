use serde::{Deserialize, Serialize};

use super::scales::ShortScales;
use crate::arith::{factor_set, FactorSieve};
use crate::energy::{tally, CountingSet, EquationKind, SolutionTally, TopPrimeConstraint, DEFAULT_PAIR_BUDGET};
use crate::error::{Error, Result};
use crate::model::RmfModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalePairCount {
    pub l1: u64,
    pub l2: u64,
    pub kind: EquationKind,
    /// Which pruned set sits in each position of the counted tuple.
    pub arrangement: [u64; 4],
    pub constraint: TopPrimeConstraint,
    pub tally: SolutionTally,
    /// `nontrivial / (H_{l1} H_{l2} / h²)`.
    pub budget_ratio: f64,
}

/// Counts the tuples `n₁, n₃ ∈ B_{l1}`, `n₂, n₄ ∈ B_{l2}` with
/// `P⁺(n₁) = P⁺(n₂)`, `P⁺(n₃) = P⁺(n₄)` solving `n₁n₂n₃n₄ = □` or
/// `n₁n₄ = n₂n₃`.
///
/// For the ratio equation the tuple is recorded as `(n₁, n₄, n₂, n₃)`, so
/// that it reads `a₁a₂ = a₃a₄` over `B_{l1} × B_{l2} × B_{l2} × B_{l1}` with
/// the crossed top-prime constraint.
pub fn verify_count_at_scales(
    sieve: &FactorSieve,
    scales: &ShortScales,
    l1: u64,
    l2: u64,
    kind: EquationKind,
) -> Result<ScalePairCount> {
    let find = |l: u64| {
        scales
            .scales
            .iter()
            .position(|s| s.prime == l)
            .ok_or_else(|| Error::invalid(format!("{l} is not one of the chosen primes")))
    };
    let (i1, i2) = (find(l1)?, find(l2)?);
    let model = match kind {
        EquationKind::SquareProduct => RmfModel::Rademacher,
        EquationKind::RatioMatch => RmfModel::Steinhaus,
    };
    let b1 = CountingSet::new(&factor_set(sieve, &scales.pruned_set(i1, model))?);
    let b2 = CountingSet::new(&factor_set(sieve, &scales.pruned_set(i2, model))?);
    let (sets, arrangement, constraint) = match kind {
        EquationKind::SquareProduct => ([&b1, &b2, &b1, &b2], [l1, l2, l1, l2], TopPrimeConstraint::PairedTwoTwo),
        EquationKind::RatioMatch => ([&b1, &b2, &b2, &b1], [l1, l2, l2, l1], TopPrimeConstraint::CrossPaired),
    };
    let t = tally(sets, kind, constraint, DEFAULT_PAIR_BUDGET)?;
    let (h1, h2) = (scales.scales[i1].h as f64, scales.scales[i2].h as f64);
    let budget_ratio = t.nontrivial as f64 / (h1 * h2 / scales.window.powi(2));
    Ok(ScalePairCount {
        l1,
        l2,
        kind,
        arrangement,
        constraint,
        tally: t,
        budget_ratio,
    })
}
