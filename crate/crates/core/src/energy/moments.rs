//! `ε₁`, `ε₁′`, `ε₂` and the moments `A`, `B` of the slice decomposition,
//! evaluated exactly from solution counts.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::count::{count_total, tally, top_prime_pairs, CountingSet};
use super::{EquationKind, TopPrimeConstraint};
use crate::error::{Error, Result};

/// Real coefficients with unit Euclidean norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::invalid("coefficient vector is empty"));
        }
        let norm2: f64 = c.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("coefficients have squared norm {norm2}, expected 1")));
        }
        Ok(Self(c))
    }

    /// `(1/√k, ..., 1/√k)`.
    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / (k as f64).sqrt(); k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub eps1: f64,
    pub eps1prime: f64,
    pub eps2: f64,
    /// Set indices attaining each maximum.
    pub eps1_witness: [usize; 4],
    pub eps1prime_witness: [usize; 4],
    pub eps2_witness: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltDiagnostics {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub k: usize,
    pub eps1: f64,
    pub eps1prime: f64,
    pub eps2: f64,
    pub max_ratio: f64,
    /// Whether the sets are pairwise disjoint.
    pub iii_b: bool,
}

/// The `k` sets and equation kind the moment functions work on.
pub struct MomentInputs<'a> {
    pub sets: &'a [CountingSet],
    pub kind: EquationKind,
    pub budget: u128,
}

impl MomentInputs<'_> {
    fn check(&self) -> Result<()> {
        if self.sets.is_empty() {
            return Err(Error::invalid("need at least one set"));
        }
        if self.sets.iter().any(|s| s.is_empty()) {
            return Err(Error::invalid("moment quantities need nonempty sets"));
        }
        if self.kind == EquationKind::SquareProduct {
            if let Some(v) = self.sets.iter().find_map(|s| s.first_non_squarefree()) {
                return Err(Error::NotSquarefree(v as u128));
            }
        }
        Ok(())
    }

    fn size(&self, l: usize) -> f64 {
        self.sets[l].len() as f64
    }
}

fn tuples(k: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = k.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = code % k;
            code /= k;
        }
        t
    })
}

pub fn epsilon_report(inputs: &MomentInputs<'_>) -> Result<EpsilonReport> {
    inputs.check()?;
    let k = inputs.sets.len();
    let paired = inputs.kind.paired_constraint();
    let mut rep = EpsilonReport {
        eps1: 0.0,
        eps1prime: 0.0,
        eps2: 0.0,
        eps1_witness: [0; 4],
        eps1prime_witness: [0; 4],
        eps2_witness: [0; 2],
    };
    for t in tuples(k, 4) {
        let sets = [&inputs.sets[t[0]], &inputs.sets[t[1]], &inputs.sets[t[2]], &inputs.sets[t[3]]];
        let norm = t.iter().map(|&l| inputs.size(l)).product::<f64>().sqrt();
        let e1 = tally(sets, inputs.kind, paired, inputs.budget)?.nontrivial as f64 / norm;
        let e1p = tally(sets, inputs.kind, TopPrimeConstraint::AllEqual, inputs.budget)?.nontrivial as f64 / norm;
        let w = [t[0], t[1], t[2], t[3]];
        if e1 > rep.eps1 {
            rep.eps1 = e1;
            rep.eps1_witness = w;
        }
        if e1p > rep.eps1prime {
            rep.eps1prime = e1p;
            rep.eps1prime_witness = w;
        }
    }
    for l1 in 0..k {
        for l2 in 0..k {
            let c = top_prime_pairs(&inputs.sets[l1], &inputs.sets[l2]) as f64;
            let e2 = c / (inputs.size(l1) * inputs.size(l2));
            if e2 > rep.eps2 {
                rep.eps2 = e2;
                rep.eps2_witness = [l1, l2];
            }
        }
    }
    Ok(rep)
}

fn weight(inputs: &MomentInputs<'_>, c: &[f64], t: &[usize]) -> f64 {
    let num: f64 = t.iter().map(|&l| c[l]).product();
    let den = t.iter().map(|&l| inputs.size(l)).product::<f64>().sqrt();
    num / den
}

fn check_coeffs(inputs: &MomentInputs<'_>, c: &CoefficientVector) -> Result<()> {
    if c.len() != inputs.sets.len() {
        return Err(Error::invalid(format!(
            "{} coefficients for {} sets",
            c.len(),
            inputs.sets.len()
        )));
    }
    Ok(())
}

/// `A = Σ_p E|Σ_l c_l M_{p,N_l}|⁴`.
pub fn compute_a(inputs: &MomentInputs<'_>, coeffs: &CoefficientVector) -> Result<f64> {
    inputs.check()?;
    check_coeffs(inputs, coeffs)?;
    let c = coeffs.as_slice();
    let mut a = 0.0;
    for t in tuples(inputs.sets.len(), 4) {
        let w = weight(inputs, c, &t);
        if w == 0.0 {
            continue;
        }
        let sets = [&inputs.sets[t[0]], &inputs.sets[t[1]], &inputs.sets[t[2]], &inputs.sets[t[3]]];
        let n = count_total(sets, inputs.kind, TopPrimeConstraint::AllEqual, inputs.budget)?;
        a += w * n as f64;
    }
    Ok(a)
}

/// `B = E(Σ_p |Σ_l c_l M_{p,N_l}|² - 1)²`, expanded as `E Q² - 2 E Q + 1`.
pub fn compute_b(inputs: &MomentInputs<'_>, coeffs: &CoefficientVector) -> Result<f64> {
    inputs.check()?;
    check_coeffs(inputs, coeffs)?;
    let c = coeffs.as_slice();
    let k = inputs.sets.len();

    // E Q²: the slice pairs (l₁ at p, conj l₂ at p) and (l₃ at q, conj l₄ at q).
    let mut eq2 = 0.0;
    for t in tuples(k, 4) {
        let w = weight(inputs, c, &t);
        if w == 0.0 {
            continue;
        }
        let n = match inputs.kind {
            EquationKind::SquareProduct => count_total(
                [&inputs.sets[t[0]], &inputs.sets[t[1]], &inputs.sets[t[2]], &inputs.sets[t[3]]],
                inputs.kind,
                TopPrimeConstraint::PairedTwoTwo,
                inputs.budget,
            )?,
            // n₁n₃ = n₂n₄ read in the ratio orientation (a₁a₂ = a₃a₄).
            EquationKind::RatioMatch => count_total(
                [&inputs.sets[t[0]], &inputs.sets[t[2]], &inputs.sets[t[1]], &inputs.sets[t[3]]],
                inputs.kind,
                TopPrimeConstraint::CrossPaired,
                inputs.budget,
            )?,
        };
        eq2 += w * n as f64;
    }

    // E Q: only equal values survive in E f(n) conj f(m).
    let mut eq = 0.0;
    let counts: Vec<HashMap<u64, u64>> = inputs
        .sets
        .iter()
        .map(|s| {
            let mut m = HashMap::new();
            for &v in s.values() {
                *m.entry(v).or_insert(0u64) += 1;
            }
            m
        })
        .collect();
    for l1 in 0..k {
        for l2 in 0..k {
            let w = weight(inputs, c, &[l1, l2]);
            let matches: u64 = counts[l1]
                .iter()
                .map(|(v, &m)| m * counts[l2].get(v).copied().unwrap_or(0))
                .sum();
            eq += w * matches as f64;
        }
    }
    Ok(eq2 - 2.0 * eq + 1.0)
}

/// `max_{l₁<l₂} √(|A_{l₁}| / |A_{l₂}|)`; `0` for a single set.
pub fn max_size_ratio(sets: &[CountingSet]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            m = m.max((sets[i].len() as f64 / sets[j].len() as f64).sqrt());
        }
    }
    m
}

/// Whether no value occurs in two different sets.
pub fn pairwise_disjoint(sets: &[CountingSet]) -> bool {
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for (l, s) in sets.iter().enumerate() {
        let distinct: HashSet<u64> = s.values().iter().copied().collect();
        for v in distinct {
            if seen.insert(v, l).is_some() {
                return false;
            }
        }
    }
    true
}

pub fn clt_diagnostics(inputs: &MomentInputs<'_>, coeffs: &CoefficientVector) -> Result<CltDiagnostics> {
    let eps = epsilon_report(inputs)?;
    Ok(CltDiagnostics {
        a: compute_a(inputs, coeffs)?,
        b: compute_b(inputs, coeffs)?,
        k: inputs.sets.len(),
        eps1: eps.eps1,
        eps1prime: eps.eps1prime,
        eps2: eps.eps2,
        max_ratio: max_size_ratio(inputs.sets),
        iii_b: pairwise_disjoint(inputs.sets),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FactorSieve;
    use crate::energy::DEFAULT_PAIR_BUDGET;

    fn sets(sieve: &FactorSieve, specs: &[&str]) -> Vec<CountingSet> {
        specs
            .iter()
            .map(|s| CountingSet::from_set(sieve, &s.parse().unwrap()).unwrap())
            .collect()
    }

    fn inputs(sets: &[CountingSet], kind: EquationKind) -> MomentInputs<'_> {
        MomentInputs {
            sets,
            kind,
            budget: DEFAULT_PAIR_BUDGET,
        }
    }

    #[test]
    fn rademacher_two_three_five() {
        let sieve = FactorSieve::new(100).unwrap();
        let s = sets(&sieve, &["list:2,3,5"]);
        let inp = inputs(&s, EquationKind::SquareProduct);
        let c = CoefficientVector::uniform(1);
        assert!((compute_a(&inp, &c).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(compute_b(&inp, &c).unwrap().abs() < 1e-12);
    }

    #[test]
    fn steinhaus_two_four() {
        let sieve = FactorSieve::new(100).unwrap();
        let s = sets(&sieve, &["list:2,4"]);
        let inp = inputs(&s, EquationKind::RatioMatch);
        let b = compute_b(&inp, &CoefficientVector::uniform(1)).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_prime() {
        let sieve = FactorSieve::new(100).unwrap();
        let s = sets(&sieve, &["list:7"]);
        for kind in [EquationKind::RatioMatch, EquationKind::SquareProduct] {
            let inp = inputs(&s, kind);
            assert_eq!(compute_a(&inp, &CoefficientVector::uniform(1)).unwrap(), 1.0);
            let e = epsilon_report(&inp).unwrap();
            assert_eq!(e.eps2, 1.0);
        }
    }

    #[test]
    fn distinct_primes_have_no_nontrivial_solutions() {
        let sieve = FactorSieve::new(100).unwrap();
        let s = sets(&sieve, &["list:2,3", "list:5,7,11", "list:13"]);
        for kind in [EquationKind::RatioMatch, EquationKind::SquareProduct] {
            let inp = inputs(&s, kind);
            let e = epsilon_report(&inp).unwrap();
            assert_eq!((e.eps1, e.eps1prime), (0.0, 0.0));
            let c = CoefficientVector::new(vec![0.6, 0.0, 0.8]).unwrap();
            assert!(compute_b(&inp, &c).unwrap().abs() < 1e-12);
        }
        assert!(pairwise_disjoint(&s));
        assert!((max_size_ratio(&s) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let sieve = FactorSieve::new(100).unwrap();
        assert!(CoefficientVector::new(vec![1.0, 1.0]).is_err());
        let s = sets(&sieve, &["list:2,4"]);
        let inp = inputs(&s, EquationKind::SquareProduct);
        assert!(matches!(
            compute_a(&inp, &CoefficientVector::uniform(1)),
            Err(Error::NotSquarefree(4))
        ));
        let s = sets(&sieve, &["list:2,3"]);
        let inp = inputs(&s, EquationKind::RatioMatch);
        assert!(compute_a(&inp, &CoefficientVector::uniform(2)).is_err());
    }
}
