use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{RmfSample, Twist};
use crate::arith::{factor_set, ArithSet, Element, FactorSieve};
use crate::error::Result;

/// Elements grouped by largest prime factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slices {
    /// Size of the whole set, used for the `1/√|set|` normalization.
    pub total: usize,
    pub by_top_prime: BTreeMap<u64, Vec<Element>>,
}

pub fn martingale_slices(sieve: &FactorSieve, set: &ArithSet) -> Result<Slices> {
    let fs = factor_set(sieve, set)?;
    let mut by_top_prime: BTreeMap<u64, Vec<Element>> = BTreeMap::new();
    for (i, el) in fs.elements().iter().enumerate() {
        by_top_prime.entry(fs.top_prime(i)).or_default().push(*el);
    }
    Ok(Slices {
        total: fs.len(),
        by_top_prime,
    })
}

/// `M_{p,N} = Σ_{P⁺(value) = p} 𝔗f(value) / √|set|` for every slice.
pub fn m_values(
    sample: &RmfSample,
    sieve: &FactorSieve,
    slices: &Slices,
    twist: Twist,
) -> Result<BTreeMap<u64, f64>> {
    twist.check_model(sample.model())?;
    let norm = (slices.total.max(1) as f64).sqrt();
    let mut out = BTreeMap::new();
    for (&p, els) in &slices.by_top_prime {
        let mut s = 0.0;
        for el in els {
            s += twist.apply(sample.f_at(sieve, el.value)?);
        }
        out.insert(p, s / norm);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoughElement {
    pub element: Element,
    pub top_prime: u64,
    /// `value / P⁺(value)`.
    pub cofactor: u64,
}

/// Split of a set at the prime threshold `P`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub threshold: u64,
    /// Elements with `P⁺(value) > P`, grouped by that prime.
    pub rough: BTreeMap<u64, Vec<RoughElement>>,
    /// Elements with `P⁺(value) ≤ P`.
    pub smooth: Vec<Element>,
    /// Whether every rough element has exactly one prime factor above `P`,
    /// to the first power.
    pub unique_large_prime: bool,
}

pub fn conditional_decompose(sieve: &FactorSieve, set: &ArithSet, threshold: u64) -> Result<Decomposition> {
    let fs = factor_set(sieve, set)?;
    let mut rough: BTreeMap<u64, Vec<RoughElement>> = BTreeMap::new();
    let mut smooth = Vec::new();
    let mut unique = true;
    for (i, el) in fs.elements().iter().enumerate() {
        let top = fs.top_prime(i);
        if top > threshold {
            let large: Vec<(u64, u32)> = fs.factors(i).filter(|f| f.0 > threshold).collect();
            unique &= large.len() == 1 && large[0].1 == 1;
            rough.entry(top).or_default().push(RoughElement {
                element: *el,
                top_prime: top,
                cofactor: el.value / top,
            });
        } else {
            smooth.push(*el);
        }
    }
    let max = fs.max_value() as u128;
    debug_assert!(
        !((threshold as u128) * (threshold as u128) >= max) || unique,
        "a threshold at or above the square root of every value forces a unique large prime"
    );
    Ok(Decomposition {
        threshold,
        rough,
        smooth,
        unique_large_prime: unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{normalized_sum, RmfModel};

    #[test]
    fn slices_of_two_three_four() {
        let sieve = FactorSieve::new(100).unwrap();
        let s = martingale_slices(&sieve, &ArithSet::explicit(vec![2, 3, 4])).unwrap();
        let keys: Vec<u64> = s.by_top_prime.keys().copied().collect();
        assert_eq!(keys, vec![2, 3]);
        assert_eq!(s.by_top_prime[&2].len(), 2);
        assert_eq!(s.by_top_prime[&3].len(), 1);
    }

    #[test]
    fn slice_values_add_up() {
        let sieve = FactorSieve::new(1000).unwrap();
        let set = ArithSet::interval(900, 300).squarefree();
        let slices = martingale_slices(&sieve, &set).unwrap();
        for seed in 0..5 {
            let sample = RmfSample::new(RmfModel::Rademacher, seed);
            let m = m_values(&sample, &sieve, &slices, Twist::Identity).unwrap();
            let total: f64 = m.values().sum();
            let s = normalized_sum(&sample, &sieve, &set, Twist::Identity).unwrap();
            assert!((total - s).abs() <= 1e-12 * s.abs().max(1.0));
        }
    }

    #[test]
    fn decomposition_extremes() {
        let sieve = FactorSieve::new(1000).unwrap();
        let set = ArithSet::interval(100, 30);
        let d = conditional_decompose(&sieve, &set, 100).unwrap();
        assert!(d.rough.is_empty());
        assert_eq!(d.smooth.len(), 30);
        let d = conditional_decompose(&sieve, &ArithSet::explicit(vec![1, 2, 6]), 1).unwrap();
        assert_eq!(d.smooth, vec![Element { index: 1, value: 1 }]);
        assert!(!d.unique_large_prime);
        let d = conditional_decompose(&sieve, &set, 10).unwrap();
        assert!(d.unique_large_prime);
        for (p, group) in &d.rough {
            for r in group {
                assert_eq!(r.cofactor * p, r.element.value);
            }
        }
    }
}
