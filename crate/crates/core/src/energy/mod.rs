//! Fourth-moment equation counts and the quantities built from them.

mod bounds;
mod count;
mod moments;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RmfModel;

pub use bounds::{
    conditional_bound, normal_comparison_bound, theorem_bound, BoundConstants, BoundValue,
    ComparisonBound, ConditionalBound, ConditionalInputs,
};
pub use count::{
    count_fourth_moment, count_fourth_moment_with_budget, count_top_prime_pairs, count_total,
    count_trivial, tally, top_prime_pairs, CountingSet, PairingCount, SolutionTally,
    DEFAULT_PAIR_BUDGET,
};
pub use moments::{
    clt_diagnostics, compute_a, compute_b, epsilon_report, max_size_ratio, pairwise_disjoint,
    CltDiagnostics, CoefficientVector, EpsilonReport, MomentInputs,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationKind {
    /// `n₁n₂n₃n₄` is a perfect square (Rademacher moments).
    #[serde(rename = "square")]
    SquareProduct,
    /// `n₁n₂ = n₃n₄`, positions 3 and 4 conjugated (Steinhaus moments).
    #[serde(rename = "ratio")]
    RatioMatch,
}

impl EquationKind {
    pub fn for_model(model: RmfModel) -> Self {
        match model {
            RmfModel::Rademacher => EquationKind::SquareProduct,
            RmfModel::Steinhaus => EquationKind::RatioMatch,
        }
    }

    /// Constraint under which the quadratic-variation moment and `ε₁` are
    /// counted in this orientation.
    pub fn paired_constraint(self) -> TopPrimeConstraint {
        match self {
            EquationKind::SquareProduct => TopPrimeConstraint::PairedTwoTwo,
            EquationKind::RatioMatch => TopPrimeConstraint::CrossPaired,
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquationKind::SquareProduct => "square",
            EquationKind::RatioMatch => "ratio",
        })
    }
}

impl FromStr for EquationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" | "square-product" => Ok(EquationKind::SquareProduct),
            "ratio" | "ratio-match" => Ok(EquationKind::RatioMatch),
            _ => Err(Error::invalid(format!("unknown equation {s:?}; use ratio or square"))),
        }
    }
}

/// Restriction on the largest prime factors of `(n₁, n₂, n₃, n₄)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopPrimeConstraint {
    None,
    /// `P⁺(n₁) = P⁺(n₂)` and `P⁺(n₃) = P⁺(n₄)`.
    #[serde(rename = "paired")]
    PairedTwoTwo,
    /// `P⁺(n₁) = P⁺(n₃)` and `P⁺(n₂) = P⁺(n₄)`.
    #[serde(rename = "cross")]
    CrossPaired,
    /// All four largest prime factors equal.
    AllEqual,
}

impl TopPrimeConstraint {
    pub const ALL: [TopPrimeConstraint; 4] = [
        TopPrimeConstraint::None,
        TopPrimeConstraint::PairedTwoTwo,
        TopPrimeConstraint::CrossPaired,
        TopPrimeConstraint::AllEqual,
    ];
}

impl fmt::Display for TopPrimeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopPrimeConstraint::None => "none",
            TopPrimeConstraint::PairedTwoTwo => "paired",
            TopPrimeConstraint::CrossPaired => "cross",
            TopPrimeConstraint::AllEqual => "all-equal",
        })
    }
}

impl FromStr for TopPrimeConstraint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TopPrimeConstraint::None),
            "paired" => Ok(TopPrimeConstraint::PairedTwoTwo),
            "cross" => Ok(TopPrimeConstraint::CrossPaired),
            "all-equal" | "all" => Ok(TopPrimeConstraint::AllEqual),
            _ => Err(Error::invalid(format!(
                "unknown constraint {s:?}; use none, paired, cross or all-equal"
            ))),
        }
    }
}
