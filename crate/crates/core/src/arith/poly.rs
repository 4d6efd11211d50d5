use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer polynomial with coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct PolySpec {
    coeffs: Vec<i64>,
}

impl PolySpec {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("polynomial must have degree at least 1"));
        }
        if *coeffs.last().unwrap() == 0 {
            return Err(Error::invalid("leading coefficient must be nonzero"));
        }
        Ok(Self { coeffs })
    }

    /// `P(x) = x`.
    pub fn identity() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact value, or `None` on `i128` overflow.
    pub fn checked_eval(&self, n: i64) -> Option<i128> {
        let x = n as i128;
        self.coeffs
            .iter()
            .rev()
            .try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c as i128))
    }

    pub fn eval(&self, n: i64) -> Result<i128> {
        self.checked_eval(n)
            .ok_or_else(|| Error::invalid(format!("P({n}) overflows 128-bit arithmetic")))
    }

    /// `P(n) mod p` for `p < 2^32`.
    pub fn eval_mod(&self, n: u64, p: u64) -> u64 {
        let x = (n % p) as u128;
        let p128 = p as u128;
        self.coeffs.iter().rev().fold(0u128, |acc, &c| {
            (acc * x + (c as i128).rem_euclid(p as i128) as u128) % p128
        }) as u64
    }

    /// Factorization over `Z` into a constant times primitive linear factors
    /// `a·x + b` (`a > 0`), when every root is rational.
    pub fn linear_factors(&self) -> Option<LinearSplit> {
        const DIVISOR_SEARCH_CAP: u128 = 1_000_000_000_000;
        let mut rem: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        let mut factors = Vec::new();
        while rem.len() > 1 {
            if rem[0] == 0 {
                rem.remove(0);
                factors.push(LinearFactor { a: 1, b: 0 });
                continue;
            }
            let lead = rem.last().unwrap().unsigned_abs();
            let tail = rem[0].unsigned_abs();
            if lead > DIVISOR_SEARCH_CAP || tail > DIVISOR_SEARCH_CAP {
                return None;
            }
            let mut found = None;
            'search: for a in divisors(lead) {
                for b0 in divisors(tail) {
                    for b in [b0 as i128, -(b0 as i128)] {
                        if gcd_u128(a, b0) != 1 {
                            continue;
                        }
                        if let Some(q) = divide_linear(&rem, a as i128, b) {
                            found = Some((a as i128, b, q));
                            break 'search;
                        }
                    }
                }
            }
            let (a, b, q) = found?;
            factors.push(LinearFactor {
                a: i64::try_from(a).ok()?,
                b: i64::try_from(b).ok()?,
            });
            rem = q;
        }
        Some(LinearSplit {
            constant: i64::try_from(rem[0]).ok()?,
            factors,
        })
    }
}

impl fmt::Display for PolySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PolySpec {
    type Err = Error;

    /// Comma-separated ascending coefficients: `"0,1,1"` is `x + x²`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::invalid(format!("bad polynomial coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

impl TryFrom<Vec<i64>> for PolySpec {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PolySpec> for Vec<i64> {
    fn from(p: PolySpec) -> Self {
        p.coeffs
    }
}

/// `a·x + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearFactor {
    pub a: i64,
    pub b: i64,
}

impl LinearFactor {
    pub fn eval(&self, n: i64) -> i128 {
        self.a as i128 * n as i128 + self.b as i128
    }
}

/// `P(x) = constant · Π factors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSplit {
    pub constant: i64,
    pub factors: Vec<LinearFactor>,
}

impl LinearSplit {
    /// Resultant `a_i b_j - a_j b_i` of two factors; every common prime
    /// divisor of their values divides it.
    pub fn resultant(f: &LinearFactor, g: &LinearFactor) -> i128 {
        f.a as i128 * g.b as i128 - g.a as i128 * f.b as i128
    }
}

fn divide_linear(p: &[i128], a: i128, b: i128) -> Option<Vec<i128>> {
    // Synthetic division by a·x + b from the top coefficient down.
    let d = p.len() - 1;
    let mut q = vec![0i128; d];
    let mut carry = p[d];
    for i in (0..d).rev() {
        if carry % a != 0 {
            return None;
        }
        let qi = carry / a;
        q[i] = qi;
        carry = p[i].checked_sub(qi.checked_mul(b)?)?;
    }
    (carry == 0).then_some(q)
}

fn divisors(n: u128) -> Vec<u128> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_constants_and_zero_leading() {
        assert!(PolySpec::new(vec![3]).is_err());
        assert!(PolySpec::new(vec![1, 0]).is_err());
        assert!("1,x".parse::<PolySpec>().is_err());
    }

    #[test]
    fn eval_and_display() {
        let p: PolySpec = "1,0,1".parse().unwrap();
        assert_eq!(p.eval(3).unwrap(), 10);
        assert_eq!(p.to_string(), "1,0,1");
        assert_eq!(p.eval_mod(3, 7), 3);
        let q = PolySpec::new(vec![-5, 0, 1]).unwrap();
        assert_eq!(q.eval_mod(1, 7), 3);
    }

    #[test]
    fn splits_products_of_linear_factors() {
        let p: PolySpec = "0,1,1".parse().unwrap();
        let s = p.linear_factors().unwrap();
        assert_eq!(s.constant, 1);
        assert_eq!(s.factors, vec![LinearFactor { a: 1, b: 0 }, LinearFactor { a: 1, b: 1 }]);

        // 6x² + 5x + 1 = (2x + 1)(3x + 1)
        let q = PolySpec::new(vec![1, 5, 6]).unwrap();
        let s = q.linear_factors().unwrap();
        assert_eq!(s.constant, 1);
        for n in -5..5 {
            let prod: i128 = s.factors.iter().map(|f| f.eval(n)).product::<i128>() * s.constant as i128;
            assert_eq!(prod, q.eval(n).unwrap());
        }

        // 2x² - 2 = 2 (x - 1)(x + 1)
        let r = PolySpec::new(vec![-2, 0, 2]).unwrap();
        let s = r.linear_factors().unwrap();
        assert_eq!(s.constant.abs(), 2);
        assert_eq!(s.factors.len(), 2);
    }

    #[test]
    fn irreducible_quadratic_has_no_split() {
        let p: PolySpec = "1,0,1".parse().unwrap();
        assert!(p.linear_factors().is_none());
    }
}
