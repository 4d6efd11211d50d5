// Brute-force reference implementations shared by the integration tests.
// Everything here factors by trial division and loops over tuples directly,
// so it shares no code with the sieve or the hashed counter.

#![allow(dead_code)]

use rmflab_core::{EquationKind, TopPrimeConstraint};

pub fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn top_prime(n: u64) -> u64 {
    trial_factor(n).last().map_or(1, |f| f.0)
}

pub fn big_omega(n: u64) -> u32 {
    trial_factor(n).iter().map(|f| f.1).sum()
}

pub fn is_squarefree(n: u64) -> bool {
    trial_factor(n).iter().all(|f| f.1 == 1)
}

pub fn tau3(n: u64) -> u64 {
    // Ordered triples (a, b, c) with abc = n.
    let mut count = 0;
    for a in 1..=n {
        if !n.is_multiple_of(a) {
            continue;
        }
        let m = n / a;
        count += (1..=m).filter(|b| m.is_multiple_of(*b)).count() as u64;
    }
    count
}

pub fn isqrt(n: u128) -> u128 {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_square(n: u128) -> bool {
    let r = isqrt(n);
    r * r == n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteTally {
    pub total: u128,
    pub trivial: u128,
}

impl BruteTally {
    pub fn nontrivial(&self) -> u128 {
        self.total - self.trivial
    }
}

fn constraint_holds(c: TopPrimeConstraint, t: [u64; 4]) -> bool {
    match c {
        TopPrimeConstraint::None => true,
        TopPrimeConstraint::PairedTwoTwo => t[0] == t[1] && t[2] == t[3],
        TopPrimeConstraint::CrossPaired => t[0] == t[2] && t[1] == t[3],
        TopPrimeConstraint::AllEqual => t[0] == t[1] && t[1] == t[2] && t[2] == t[3],
    }
}

fn trivial(kind: EquationKind, v: [u64; 4]) -> bool {
    let p13_24 = v[0] == v[2] && v[1] == v[3];
    let p14_23 = v[0] == v[3] && v[1] == v[2];
    match kind {
        EquationKind::RatioMatch => p13_24 || p14_23,
        EquationKind::SquareProduct => p13_24 || p14_23 || (v[0] == v[1] && v[2] == v[3]),
    }
}

/// Parity vector of the exponents over the first 128 primes, when `n`
/// has no larger prime factor.
fn parity_mask(n: u64, primes: &[u64]) -> Option<u128> {
    let mut m = 0u128;
    for (p, a) in trial_factor(n) {
        let i = primes.iter().position(|&q| q == p)?;
        if a % 2 == 1 {
            m ^= 1 << i;
        }
    }
    Some(m)
}

fn first_primes(count: usize) -> Vec<u64> {
    (2u64..).filter(|&n| trial_factor(n).len() == 1 && trial_factor(n)[0].1 == 1).take(count).collect()
}

/// Exhaustive count of index tuples in `A₁×A₂×A₃×A₄` solving the equation
/// under the constraint.
///
/// The loops are nested per half of the constraint (positions `1,2` and
/// `3,4`, or `1,3` and `2,4` for the crossed one), and a half is skipped
/// as soon as its own top-prime condition fails. Every tuple that
/// satisfies the constraint is visited and tested directly.
pub fn brute_tally(sets: [&[u64]; 4], kind: EquationKind, constraint: TopPrimeConstraint) -> BruteTally {
    let tops: Vec<Vec<u64>> = sets.iter().map(|s| s.iter().map(|&v| top_prime(v)).collect()).collect();
    let primes = first_primes(128);
    let masks: Option<Vec<Vec<u128>>> = sets
        .iter()
        .map(|s| s.iter().map(|&v| parity_mask(v, &primes)).collect())
        .collect();
    let (left, right) = match constraint {
        TopPrimeConstraint::CrossPaired => ((0, 2), (1, 3)),
        _ => ((0, 1), (2, 3)),
    };
    let same_top_in_half = |a: usize, b: usize, i: usize, j: usize| match constraint {
        TopPrimeConstraint::None => true,
        _ => tops[a][i] == tops[b][j],
    };
    let half = |(a, b): (usize, usize)| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..sets[a].len() {
            for j in 0..sets[b].len() {
                if same_top_in_half(a, b, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    };
    let (lh, rh) = (half(left), half(right));
    let mut total = 0u128;
    let mut triv = 0u128;
    for &(i, j) in &lh {
        for &(k, l) in &rh {
            let mut idx = [0usize; 4];
            idx[left.0] = i;
            idx[left.1] = j;
            idx[right.0] = k;
            idx[right.1] = l;
            let t = [tops[0][idx[0]], tops[1][idx[1]], tops[2][idx[2]], tops[3][idx[3]]];
            if !constraint_holds(constraint, t) {
                continue;
            }
            let v = [sets[0][idx[0]], sets[1][idx[1]], sets[2][idx[2]], sets[3][idx[3]]];
            let solves = match kind {
                EquationKind::RatioMatch => v[0] as u128 * v[1] as u128 == v[2] as u128 * v[3] as u128,
                EquationKind::SquareProduct => match &masks {
                    Some(m) => m[0][idx[0]] ^ m[1][idx[1]] ^ m[2][idx[2]] ^ m[3][idx[3]] == 0,
                    None => is_square(v.iter().map(|&x| x as u128).product()),
                },
            };
            if solves {
                total += 1;
                if trivial(kind, v) {
                    triv += 1;
                }
            }
        }
    }
    BruteTally { total, trivial: triv }
}

/// Tuples `n₁, n₃ ∈ B₁`, `n₂, n₄ ∈ B₂` with `P⁺(n₁) = P⁺(n₂)` and
/// `P⁺(n₃) = P⁺(n₄)` solving `n₁n₂n₃n₄ = □` or `n₁n₄ = n₂n₃`.
///
/// Same-top-prime pairs are listed first, then every pair of pairs is
/// tested against the equation itself.
pub fn scale_pair_oracle(b1: &[u64], b2: &[u64], kind: EquationKind) -> BruteTally {
    let t1: Vec<u64> = b1.iter().map(|&v| top_prime(v)).collect();
    let t2: Vec<u64> = b2.iter().map(|&v| top_prime(v)).collect();
    let mut pairs = Vec::new();
    for (i, &x) in b1.iter().enumerate() {
        for (j, &y) in b2.iter().enumerate() {
            if t1[i] == t2[j] {
                pairs.push((x, y));
            }
        }
    }
    let mut total = 0u128;
    let mut triv = 0u128;
    for &(n1, n2) in &pairs {
        for &(n3, n4) in &pairs {
            let (solves, trivial) = match kind {
                EquationKind::SquareProduct => (
                    is_square(n1 as u128 * n2 as u128 * n3 as u128 * n4 as u128),
                    (n1 == n2 && n3 == n4) || (n1 == n3 && n2 == n4) || (n1 == n4 && n2 == n3),
                ),
                EquationKind::RatioMatch => (
                    n1 as u128 * n4 as u128 == n2 as u128 * n3 as u128,
                    (n1 == n2 && n4 == n3) || (n1 == n3 && n4 == n2),
                ),
            };
            if solves {
                total += 1;
                triv += trivial as u128;
            }
        }
    }
    BruteTally { total, trivial: triv }
}
