//! Smallest-prime-factor table built with a linear sieve.

use crate::error::{Error, Result};

/// Default ceiling on the sieve limit; the table costs four bytes per entry.
pub const DEFAULT_SIEVE_CAP: u64 = 200_000_000;

/// Immutable table of smallest prime factors for `2..=limit`.
///
/// Every factorization-derived statistic in the crate (largest prime factor,
/// `Ω`, squarefree kernel, `τ₃`, smooth counts) is read off this table by
/// repeated division, which costs `Ω(n)` steps.
#[derive(Clone)]
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl std::fmt::Debug for FactorSieve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorSieve")
            .field("limit", &self.limit)
            .field("primes", &self.primes.len())
            .finish()
    }
}

impl FactorSieve {
    /// Builds the table for `2..=limit` under [`DEFAULT_SIEVE_CAP`].
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > cap || limit > u32::MAX as u64 {
            return Err(Error::SieveTooLarge {
                requested: limit,
                cap: cap.min(u32::MAX as u64),
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        spf[1] = 1;
        let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(limit));
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self { limit, spf, primes })
    }

    /// Reassembles a sieve from a raw table. The caller guarantees the
    /// table satisfies the sieve invariants (used by the cache loader).
    pub(crate) fn from_raw(limit: u64, spf: Vec<u32>) -> Self {
        let primes = (2..=limit as usize)
            .filter(|&n| spf[n] as usize == n)
            .map(|n| n as u32)
            .collect();
        Self { limit, spf, primes }
    }

    pub(crate) fn raw_table(&self) -> &[u32] {
        &self.spf
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `p <= bound`, ascending.
    pub fn primes_up_to(&self, bound: u64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as u64) <= bound);
        &self.primes[..end]
    }

    pub fn contains(&self, n: u64) -> bool {
        (1..=self.limit).contains(&n)
    }

    pub(crate) fn check(&self, n: u64) -> Result<()> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                value: n as u128,
                limit: self.limit,
            })
        }
    }

    /// Smallest prime factor; `spf(1) = 1`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check(n)?;
        Ok(n >= 2 && self.spf[n as usize] as u64 == n)
    }

    /// Prime-power factorization of `n` as ascending `(p, a)` pairs.
    pub fn factorize(&self, n: u64) -> Result<Factors<'_>> {
        self.check(n)?;
        Ok(self.factors_unchecked(n))
    }

    pub(crate) fn factors_unchecked(&self, n: u64) -> Factors<'_> {
        Factors {
            spf: &self.spf,
            rest: n as u32,
        }
    }

    /// Largest prime factor `P⁺(n)`, with `P⁺(1) = 1`.
    pub fn largest_prime_factor(&self, n: u64) -> Result<u64> {
        Ok(self.factorize(n)?.last().map_or(1, |(p, _)| p))
    }

    /// Number of prime factors counted with multiplicity.
    pub fn omega_big(&self, n: u64) -> Result<u32> {
        Ok(self.factorize(n)?.map(|(_, a)| a).sum())
    }

    /// Product of the primes dividing `n` to an odd power.
    pub fn squarefree_kernel(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .filter(|&(_, a)| a % 2 == 1)
            .map(|(p, _)| p)
            .product())
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        Ok(self.factorize(n)?.all(|(_, a)| a == 1))
    }

    /// Three-fold divisor function.
    pub fn tau3(&self, n: u64) -> Result<u64> {
        Ok(self.factorize(n)?.map(|(_, a)| tau3_prime_power(a)).product())
    }
}

/// `τ₃(pᵃ) = C(a + 2, 2)`.
pub fn tau3_prime_power(a: u32) -> u64 {
    let a = a as u64;
    (a + 1) * (a + 2) / 2
}

fn estimate_prime_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// Iterator over the prime-power factorization, smallest prime first.
pub struct Factors<'a> {
    spf: &'a [u32],
    rest: u32,
}

impl Iterator for Factors<'_> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<(u64, u32)> {
        if self.rest <= 1 {
            return None;
        }
        let p = self.spf[self.rest as usize];
        let mut a = 0;
        while self.rest.is_multiple_of(p) {
            self.rest /= p;
            a += 1;
        }
        Some((p as u64, a))
    }
}
