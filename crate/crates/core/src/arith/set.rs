//! Finite index/value sets: short intervals, polynomial images, explicit
//! lists, with squarefree / top-prime / `Ω` filters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::poly::PolySpec;
use super::polysieve::{factor_poly_range, isqrt_u128};
use super::sieve::FactorSieve;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetKind {
    /// The integers in `(n - h, n]`.
    Interval { n: u64, h: u64 },
    /// `P(m)` for `1 ≤ m ≤ n`, keeping positive values only.
    PolyImage { poly: PolySpec, n: u64 },
    /// Distinct positive integers, sorted; index equals value.
    Explicit { values: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithSet {
    pub kind: SetKind,
    #[serde(default)]
    pub squarefree_only: bool,
    #[serde(default)]
    pub top_prime_floor: Option<u64>,
    #[serde(default)]
    pub omega_ceiling: Option<u32>,
}

/// One surviving term: `index` is the position variable (`n` for
/// polynomial images) and `value` the integer the function is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element {
    pub index: u64,
    pub value: u64,
}

impl ArithSet {
    fn from_kind(kind: SetKind) -> Self {
        Self {
            kind,
            squarefree_only: false,
            top_prime_floor: None,
            omega_ceiling: None,
        }
    }

    pub fn interval(n: u64, h: u64) -> Self {
        Self::from_kind(SetKind::Interval { n, h })
    }

    pub fn poly_image(poly: PolySpec, n: u64) -> Self {
        Self::from_kind(SetKind::PolyImage { poly, n })
    }

    pub fn explicit(mut values: Vec<u64>) -> Self {
        values.sort_unstable();
        values.dedup();
        Self::from_kind(SetKind::Explicit { values })
    }

    pub fn squarefree(mut self) -> Self {
        self.squarefree_only = true;
        self
    }

    pub fn with_top_prime_floor(mut self, floor: u64) -> Self {
        self.top_prime_floor = Some(floor);
        self
    }

    pub fn with_omega_ceiling(mut self, ceiling: u32) -> Self {
        self.omega_ceiling = Some(ceiling);
        self
    }

    pub fn without_filters(&self) -> Self {
        Self::from_kind(self.kind.clone())
    }

    /// Smallest sieve limit for which `factor_set` accepts this set.
    pub fn sieve_requirement(&self) -> Result<u64> {
        let need = match &self.kind {
            SetKind::Interval { n, h } => {
                if h > n {
                    return Err(Error::invalid(format!("interval length {h} exceeds endpoint {n}")));
                }
                *n
            }
            SetKind::Explicit { values } => values.last().copied().unwrap_or(0),
            SetKind::PolyImage { poly, n } => {
                let mut max_abs = 0u128;
                for m in 1..=*n {
                    let m = i64::try_from(m).map_err(|_| Error::invalid("polynomial argument too large"))?;
                    max_abs = max_abs.max(poly.eval(m)?.unsigned_abs());
                }
                let root = isqrt_u128(max_abs);
                u64::try_from(root + 1).map_err(|_| Error::invalid("polynomial values too large"))?
            }
        };
        Ok(need.max(2))
    }

    fn accepts(&self, factors: &[(u64, u32)]) -> bool {
        if self.squarefree_only && factors.iter().any(|&(_, a)| a > 1) {
            return false;
        }
        if let Some(floor) = self.top_prime_floor {
            let top = factors.last().map_or(1, |f| f.0);
            if top <= floor {
                return false;
            }
        }
        if let Some(c) = self.omega_ceiling {
            if factors.iter().map(|f| f.1).sum::<u32>() > c {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for ArithSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SetKind::Interval { n, h } => write!(f, "interval:{n},{h}")?,
            SetKind::PolyImage { poly, n } => write!(f, "poly:{n}:{poly}")?,
            SetKind::Explicit { values } => {
                let v: Vec<String> = values.iter().map(|x| x.to_string()).collect();
                write!(f, "list:{}", v.join(","))?
            }
        }
        if self.squarefree_only {
            f.write_str("/sf")?;
        }
        if let Some(t) = self.top_prime_floor {
            write!(f, "/top>{t}")?;
        }
        if let Some(c) = self.omega_ceiling {
            write!(f, "/omega<={c}")?;
        }
        Ok(())
    }
}

impl FromStr for ArithSet {
    type Err = Error;

    /// Accepted forms: `interval:N,H`, `range:a,b` (the integers `a..=b`),
    /// `list:v1,v2,...`, `poly:N:c0,c1,...`, each optionally followed by
    /// `/sf`, `/top>F`, `/omega<=C`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('/');
        let head = parts.next().unwrap_or_default();
        let (tag, body) = head
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("set {s:?} lacks a kind prefix")))?;
        let ints = |t: &str| -> Result<Vec<u64>> {
            t.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::invalid(format!("bad integer {x:?} in set {s:?}")))
                })
                .collect()
        };
        let mut set = match tag {
            "interval" => match ints(body)?.as_slice() {
                &[n, h] => ArithSet::interval(n, h),
                _ => return Err(Error::invalid("interval needs N,H")),
            },
            "range" => match ints(body)?.as_slice() {
                &[a, b] if a >= 1 && a <= b => ArithSet::interval(b, b - a + 1),
                _ => return Err(Error::invalid("range needs a,b with 1 <= a <= b")),
            },
            "list" => ArithSet::explicit(ints(body)?),
            "poly" => {
                let (n, coeffs) = body
                    .split_once(':')
                    .ok_or_else(|| Error::invalid("poly set needs N:c0,c1,..."))?;
                let n = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad N {n:?}")))?;
                ArithSet::poly_image(coeffs.parse()?, n)
            }
            other => return Err(Error::invalid(format!("unknown set kind {other:?}"))),
        };
        for filt in parts {
            if filt == "sf" {
                set.squarefree_only = true;
            } else if let Some(v) = filt.strip_prefix("top>") {
                set.top_prime_floor = Some(
                    v.parse()
                        .map_err(|_| Error::invalid(format!("bad top-prime floor {v:?}")))?,
                );
            } else if let Some(v) = filt.strip_prefix("omega<=") {
                set.omega_ceiling =
                    Some(v.parse().map_err(|_| Error::invalid(format!("bad omega ceiling {v:?}")))?);
            } else {
                return Err(Error::invalid(format!("unknown set filter {filt:?}")));
            }
        }
        Ok(set)
    }
}

/// Enumerated set together with the factorization of every value.
#[derive(Clone, Debug, Default)]
pub struct FactoredSet {
    elements: Vec<Element>,
    offsets: Vec<usize>,
    primes: Vec<u64>,
    exps: Vec<u8>,
}

impl FactoredSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().map(|e| e.value)
    }

    /// Prime-power factorization of element `i`, ascending.
    pub fn factors(&self, i: usize) -> impl Iterator<Item = (u64, u32)> + '_ {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        self.primes[s..e]
            .iter()
            .zip(&self.exps[s..e])
            .map(|(&p, &a)| (p, a as u32))
    }

    pub fn top_prime(&self, i: usize) -> u64 {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        if s == e {
            1
        } else {
            self.primes[e - 1]
        }
    }

    pub fn omega(&self, i: usize) -> u32 {
        self.factors(i).map(|f| f.1).sum()
    }

    pub fn is_squarefree(&self, i: usize) -> bool {
        self.factors(i).all(|f| f.1 == 1)
    }

    pub fn kernel(&self, i: usize) -> u64 {
        self.factors(i).filter(|f| f.1 % 2 == 1).map(|f| f.0).product()
    }

    pub fn max_value(&self) -> u64 {
        self.values().max().unwrap_or(0)
    }

    /// Sub-collection of the elements selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> FactoredSet {
        let mut out = FactoredSet {
            offsets: vec![0],
            ..Default::default()
        };
        for i in 0..self.len() {
            if keep(i) {
                out.push(self.elements[i], self.factors(i));
            }
        }
        out
    }

    fn push(&mut self, el: Element, factors: impl Iterator<Item = (u64, u32)>) {
        self.elements.push(el);
        for (p, a) in factors {
            self.primes.push(p);
            self.exps.push(a as u8);
        }
        self.offsets.push(self.primes.len());
    }
}

/// Enumerates a set with every value factored. Interval and list values
/// must lie within the sieve; polynomial values may reach the square of
/// the sieve limit.
pub fn factor_set(sieve: &FactorSieve, set: &ArithSet) -> Result<FactoredSet> {
    let mut out = FactoredSet {
        offsets: vec![0],
        ..Default::default()
    };
    let mut scratch: Vec<(u64, u32)> = Vec::new();
    match &set.kind {
        SetKind::Interval { n, h } => {
            if h > n {
                return Err(Error::invalid(format!("interval length {h} exceeds endpoint {n}")));
            }
            if *h > 0 {
                sieve.check(*n)?;
            }
            for v in (n - h + 1)..=*n {
                scratch.clear();
                scratch.extend(sieve.factors_unchecked(v));
                if set.accepts(&scratch) {
                    out.push(Element { index: v, value: v }, scratch.iter().copied());
                }
            }
        }
        SetKind::Explicit { values } => {
            for &v in values {
                sieve.check(v)?;
                scratch.clear();
                scratch.extend(sieve.factors_unchecked(v));
                if set.accepts(&scratch) {
                    out.push(Element { index: v, value: v }, scratch.iter().copied());
                }
            }
        }
        SetKind::PolyImage { poly, n } => {
            let rf = factor_poly_range(sieve, poly, 1, *n)?;
            for (i, &v) in rf.values.iter().enumerate() {
                if v <= 0 {
                    continue;
                }
                scratch.clear();
                scratch.extend(rf.row(i));
                if set.accepts(&scratch) {
                    let el = Element {
                        index: i as u64 + 1,
                        value: v as u64,
                    };
                    out.push(el, scratch.iter().copied());
                }
            }
        }
    }
    Ok(out)
}

/// Surviving `(index, value)` pairs in ascending index order.
pub fn enumerate_set(sieve: &FactorSieve, set: &ArithSet) -> Result<Vec<Element>> {
    Ok(factor_set(sieve, set)?.elements)
}
