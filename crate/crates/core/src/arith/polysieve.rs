//! Factorization of polynomial values that exceed the sieve limit.
//!
//! For `n` in a range, `P(n)` is divided by every prime `p ≤ √max|P(n)|`
//! along the residue classes of the roots of `P` mod `p`; whatever is left
//! above 1 is a single prime.

use super::poly::PolySpec;
use super::sieve::FactorSieve;
use crate::error::{Error, Result};

/// Factorizations of `P(n)` for `lo ≤ n ≤ hi` in compressed rows.
#[derive(Clone, Debug)]
pub(crate) struct RangeFactorization {
    pub values: Vec<i128>,
    pub offsets: Vec<usize>,
    pub primes: Vec<u64>,
    pub exps: Vec<u8>,
}

impl RangeFactorization {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (u64, u32)> + '_ {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        self.primes[s..e]
            .iter()
            .zip(&self.exps[s..e])
            .map(|(&p, &a)| (p, a as u32))
    }
}

/// Factorizes `|P(n)|` for every `n` in `lo..=hi`. Rows for `P(n) = 0` are
/// empty. Values above `u64::MAX` or with `√|P(n)|` above the sieve limit
/// are rejected.
pub(crate) fn factor_poly_range(
    sieve: &FactorSieve,
    poly: &PolySpec,
    lo: u64,
    hi: u64,
) -> Result<RangeFactorization> {
    if lo > hi {
        return Ok(RangeFactorization {
            values: Vec::new(),
            offsets: vec![0],
            primes: Vec::new(),
            exps: Vec::new(),
        });
    }
    let len = (hi - lo + 1) as usize;
    let mut values = Vec::with_capacity(len);
    let mut max_abs = 0u128;
    for n in lo..=hi {
        let n = i64::try_from(n).map_err(|_| Error::invalid("polynomial argument too large"))?;
        let v = poly.eval(n)?;
        if v.unsigned_abs() > u64::MAX as u128 {
            return Err(Error::OutOfRange {
                value: v.unsigned_abs(),
                limit: sieve.limit(),
            });
        }
        max_abs = max_abs.max(v.unsigned_abs());
        values.push(v);
    }

    if max_abs <= sieve.limit() as u128 {
        let mut offsets = Vec::with_capacity(len + 1);
        let mut primes = Vec::new();
        let mut exps = Vec::new();
        offsets.push(0);
        for &v in &values {
            if v != 0 {
                for (p, a) in sieve.factors_unchecked(v.unsigned_abs() as u64) {
                    primes.push(p);
                    exps.push(a as u8);
                }
            }
            offsets.push(primes.len());
        }
        return Ok(RangeFactorization { values, offsets, primes, exps });
    }

    let bound = isqrt_u128(max_abs) as u64;
    if bound > sieve.limit() {
        return Err(Error::OutOfRange {
            value: max_abs,
            limit: sieve.limit(),
        });
    }

    let mut residual: Vec<u64> = values.iter().map(|v| v.unsigned_abs() as u64).collect();
    let mut triples: Vec<(u32, u64, u8)> = Vec::new();
    for &p in sieve.primes_up_to(bound) {
        let p = p as u64;
        let roots = match roots_mod_prime(poly.coeffs(), p) {
            RootSet::All => (0..p).collect(),
            RootSet::Some(r) => r,
        };
        for r in roots {
            let first = lo + (r + p - lo % p) % p;
            let mut n = first;
            while n <= hi {
                let i = (n - lo) as usize;
                let m = &mut residual[i];
                if *m != 0 && (*m).is_multiple_of(p) {
                    let mut a = 0u8;
                    while (*m).is_multiple_of(p) {
                        *m /= p;
                        a += 1;
                    }
                    triples.push((i as u32, p, a));
                }
                n += p;
            }
        }
    }
    for (i, &m) in residual.iter().enumerate() {
        if m > 1 {
            triples.push((i as u32, m, 1));
        }
    }
    // Stable: primes of each row stay ascending because the leftover
    // cofactor exceeds every sieved prime.
    triples.sort_by_key(|t| t.0);
    let mut offsets = vec![0usize; len + 1];
    for t in &triples {
        offsets[t.0 as usize + 1] += 1;
    }
    for i in 0..len {
        offsets[i + 1] += offsets[i];
    }
    let primes = triples.iter().map(|t| t.1).collect();
    let exps = triples.iter().map(|t| t.2).collect();
    Ok(RangeFactorization { values, offsets, primes, exps })
}

pub(crate) fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RootSet {
    /// The polynomial vanishes identically mod p.
    All,
    Some(Vec<u64>),
}

/// Distinct roots of the integer polynomial `coeffs` modulo the prime `p`,
/// ascending.
pub(crate) fn roots_mod_prime(coeffs: &[i64], p: u64) -> RootSet {
    let mut f: Vec<u64> = coeffs
        .iter()
        .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
        .collect();
    trim(&mut f);
    if f.is_empty() {
        return RootSet::All;
    }
    if f.len() == 1 {
        return RootSet::Some(Vec::new());
    }
    let deg = f.len() - 1;
    if p <= 64 + 16 * deg as u64 {
        let roots = (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
        return RootSet::Some(roots);
    }
    let f = make_monic(&f, p);
    // gcd(x^p - x, f) is the product of the distinct linear factors.
    let xp = pow_x_mod(p, &f, p);
    let mut h = xp;
    sub_x(&mut h, p);
    let g = gcd(&f, &h, p);
    let mut roots = Vec::new();
    split(&g, p, 1, &mut roots);
    roots.sort_unstable();
    RootSet::Some(roots)
}

fn split(g: &[u64], p: u64, mut shift: u64, out: &mut Vec<u64>) {
    let deg = g.len() - 1;
    if deg == 0 {
        return;
    }
    if deg == 1 {
        out.push((p - g[0]) % p);
        return;
    }
    // (x + s)^((p-1)/2) - 1 separates roots by quadratic character.
    loop {
        let mut w = pow_mod_poly(&[shift % p, 1], (p - 1) / 2, g, p);
        shift += 1;
        if w.is_empty() {
            w.push(0);
        }
        w[0] = (w[0] + p - 1) % p;
        trim(&mut w);
        let d = gcd(g, &w, p);
        let dd = d.len() - 1;
        if dd > 0 && dd < deg {
            let q = div_exact(g, &d, p);
            split(&d, p, shift, out);
            split(&q, p, shift, out);
            return;
        }
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn trim(f: &mut Vec<u64>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, p) + c) % p)
}

fn make_monic(f: &[u64], p: u64) -> Vec<u64> {
    let li = inv(*f.last().unwrap(), p);
    f.iter().map(|&c| mulmod(c, li, p)).collect()
}

fn sub_x(h: &mut Vec<u64>, p: u64) {
    if h.len() < 2 {
        h.resize(2, 0);
    }
    h[1] = (h[1] + p - 1) % p;
    trim(h);
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let li = inv(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let q = mulmod(r[top], li, p);
        if q != 0 {
            for (rj, &mi) in r[top - dm..=top].iter_mut().zip(m) {
                *rj = (*rj + p - mulmod(q, mi, p)) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn mul_mod_poly(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % pp;
        }
    }
    let prod: Vec<u64> = prod.into_iter().map(|v| v as u64).collect();
    rem(&prod, m, p)
}

fn pow_mod_poly(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod_poly(&result, &b, m, p);
        }
        b = mul_mod_poly(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn pow_x_mod(e: u64, m: &[u64], p: u64) -> Vec<u64> {
    pow_mod_poly(&[0, 1], e, m, p)
}

/// Monic gcd.
fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if x.is_empty() {
        return x;
    }
    make_monic(&x, p)
}

fn div_exact(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dd = d.len() - 1;
    let li = inv(d[dd], p);
    let mut q = vec![0u64; a.len() - dd];
    for top in (dd..a.len()).rev() {
        let c = mulmod(r[top], li, p);
        q[top - dd] = c;
        if c != 0 {
            for (rj, &di) in r[top - dd..=top].iter_mut().zip(d) {
                *rj = (*rj + p - mulmod(c, di, p)) % p;
            }
        }
    }
    q
}
