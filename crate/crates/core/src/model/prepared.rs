use num_complex::Complex64;

use super::{phase_to_unit, RmfModel, RmfSample, Twist};
use crate::arith::{factor_set, ArithSet, Element, FactorSieve, FactoredSet};
use crate::error::{Error, Result};

/// A factored set laid out for repeated evaluation: the distinct primes
/// are numbered densely so each trial hashes every prime once.
#[derive(Clone, Debug)]
pub struct PreparedSet {
    model: RmfModel,
    elements: Vec<Element>,
    tops: Vec<u64>,
    primes: Vec<u64>,
    offsets: Vec<usize>,
    terms: Vec<(u32, u32)>,
}

impl PreparedSet {
    pub fn new(model: RmfModel, set: &FactoredSet) -> Result<Self> {
        let mut primes: Vec<u64> = (0..set.len())
            .flat_map(|i| set.factors(i).map(|f| f.0))
            .collect();
        primes.sort_unstable();
        primes.dedup();
        let mut offsets = Vec::with_capacity(set.len() + 1);
        let mut terms = Vec::new();
        offsets.push(0);
        for i in 0..set.len() {
            for (p, a) in set.factors(i) {
                if model == RmfModel::Rademacher && a > 1 {
                    return Err(Error::NotSquarefree(set.elements()[i].value as u128));
                }
                let idx = primes.binary_search(&p).unwrap() as u32;
                terms.push((idx, a));
            }
            offsets.push(terms.len());
        }
        Ok(Self {
            model,
            elements: set.elements().to_vec(),
            tops: (0..set.len()).map(|i| set.top_prime(i)).collect(),
            primes,
            offsets,
            terms,
        })
    }

    pub fn from_set(model: RmfModel, sieve: &FactorSieve, set: &ArithSet) -> Result<Self> {
        Self::new(model, &factor_set(sieve, set)?)
    }

    pub fn model(&self) -> RmfModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Largest prime factor of each element.
    pub fn top_primes(&self) -> &[u64] {
        &self.tops
    }

    /// `f(value)` for every element, in element order.
    pub fn values(&self, sample: &RmfSample) -> Vec<Complex64> {
        debug_assert_eq!(sample.model(), self.model);
        let terms = |i: usize| &self.terms[self.offsets[i]..self.offsets[i + 1]];
        match self.model {
            RmfModel::Rademacher => {
                let signs: Vec<i8> = self.primes.iter().map(|&p| sample.prime_sign(p)).collect();
                (0..self.len())
                    .map(|i| {
                        let s = terms(i).iter().fold(1i8, |acc, t| acc * signs[t.0 as usize]);
                        Complex64::new(s as f64, 0.0)
                    })
                    .collect()
            }
            RmfModel::Steinhaus => {
                let phases: Vec<u64> = self.primes.iter().map(|&p| sample.prime_phase(p)).collect();
                (0..self.len())
                    .map(|i| {
                        let ph = terms(i).iter().fold(0u64, |acc, t| {
                            acc.wrapping_add(phases[t.0 as usize].wrapping_mul(t.1 as u64))
                        });
                        phase_to_unit(ph)
                    })
                    .collect()
            }
        }
    }

    /// `Σ 𝔗f(value)` accumulated in element order.
    pub fn twisted_sum(&self, sample: &RmfSample, twist: Twist) -> f64 {
        self.values(sample).into_iter().map(|z| twist.apply(z)).sum()
    }

    /// `Σ 𝔗f(value) / √|set|`; zero for the empty set.
    pub fn normalized_sum(&self, sample: &RmfSample, twist: Twist) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.twisted_sum(sample, twist) / (self.len() as f64).sqrt()
    }

    /// Untwisted sums `Σ_{P⁺(value) = p} f(value)` for each top prime `p`,
    /// ascending in `p`.
    pub fn slice_sums(&self, sample: &RmfSample) -> Vec<(u64, Complex64)> {
        let vals = self.values(sample);
        let mut pairs: Vec<(u64, Complex64)> = self.tops.iter().copied().zip(vals).collect();
        pairs.sort_by_key(|t| t.0);
        let mut out: Vec<(u64, Complex64)> = Vec::new();
        for (p, z) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += z,
                _ => out.push((p, z)),
            }
        }
        out
    }
}

/// `Σ 𝔗f(value)` over the set; `0` for the empty set.
pub fn twisted_sum(sample: &RmfSample, sieve: &FactorSieve, set: &ArithSet, twist: Twist) -> Result<f64> {
    twist.check_model(sample.model())?;
    let prepared = PreparedSet::from_set(sample.model(), sieve, set)?;
    Ok(prepared.twisted_sum(sample, twist))
}

/// `S_N = Σ 𝔗f(value) / √|set|`.
pub fn normalized_sum(sample: &RmfSample, sieve: &FactorSieve, set: &ArithSet, twist: Twist) -> Result<f64> {
    twist.check_model(sample.model())?;
    let prepared = PreparedSet::from_set(sample.model(), sieve, set)?;
    if prepared.is_empty() {
        return Err(Error::invalid("normalized sum over an empty set"));
    }
    Ok(prepared.normalized_sum(sample, twist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sums() {
        let sieve = FactorSieve::new(1000).unwrap();
        let r = RmfSample::new(RmfModel::Rademacher, 5);
        let empty = ArithSet::explicit(vec![]);
        assert_eq!(twisted_sum(&r, &sieve, &empty, Twist::Identity).unwrap(), 0.0);
        assert!(normalized_sum(&r, &sieve, &empty, Twist::Identity).is_err());
        let one = ArithSet::explicit(vec![1]);
        assert_eq!(twisted_sum(&r, &sieve, &one, Twist::Identity).unwrap(), 1.0);

        let s = RmfSample::new(RmfModel::Steinhaus, 5);
        let p = ArithSet::explicit(vec![13]);
        let theta = std::f64::consts::TAU * crate::seed::unit_f64(s.prime_phase(13));
        let got = twisted_sum(&s, &sieve, &p, Twist::Sqrt2Re).unwrap();
        assert!((got - std::f64::consts::SQRT_2 * theta.cos()).abs() < 1e-15);
        assert!(twisted_sum(&s, &sieve, &p, Twist::Identity).is_err());
    }

    #[test]
    fn prepared_values_match_pointwise_evaluation() {
        let sieve = FactorSieve::new(5000).unwrap();
        let set = ArithSet::interval(5000, 700);
        for model in [RmfModel::Steinhaus, RmfModel::Rademacher] {
            let set = if model == RmfModel::Rademacher { set.clone().squarefree() } else { set.clone() };
            let prepared = PreparedSet::from_set(model, &sieve, &set).unwrap();
            let sample = RmfSample::new(model, 77);
            let vals = prepared.values(&sample);
            for (el, z) in prepared.elements().iter().zip(vals) {
                assert_eq!(sample.f_at(&sieve, el.value).unwrap(), z);
            }
        }
    }

    #[test]
    fn rademacher_needs_squarefree_sets() {
        let sieve = FactorSieve::new(100).unwrap();
        let err = PreparedSet::from_set(RmfModel::Rademacher, &sieve, &ArithSet::interval(10, 3)).unwrap_err();
        assert!(matches!(err, Error::NotSquarefree(8)));
    }

    #[test]
    fn singleton_normalization() {
        let sieve = FactorSieve::new(100).unwrap();
        let r = RmfSample::new(RmfModel::Rademacher, 1);
        let v = normalized_sum(&r, &sieve, &ArithSet::explicit(vec![7]), Twist::Identity).unwrap();
        assert_eq!(v, r.prime_sign(7) as f64);
        let two = normalized_sum(&r, &sieve, &ArithSet::explicit(vec![7, 11]), Twist::Identity).unwrap();
        let expected = (r.prime_sign(7) + r.prime_sign(11)) as f64 / 2f64.sqrt();
        assert_eq!(two, expected);
    }
}
