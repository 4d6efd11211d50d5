//! Exact solution counts for `n₁n₂ = n₃n₄` and `n₁n₂n₃n₄ = □` over four
//! finite sets, by splitting the quadruple into two halves and matching
//! hash keys.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use serde::{Deserialize, Serialize};

use super::{EquationKind, TopPrimeConstraint};
use crate::arith::{factor_set, ArithSet, FactorSieve, FactoredSet};
use crate::error::{Error, Result};
use crate::seed::mix64;

/// Default ceiling on pair enumerations per half.
pub const DEFAULT_PAIR_BUDGET: u128 = 10_000_000_000;

/// Per-set data needed by the counters.
#[derive(Clone, Debug)]
pub struct CountingSet {
    values: Vec<u64>,
    tops: Vec<u64>,
    kernels: Vec<u64>,
}

impl CountingSet {
    pub fn new(set: &FactoredSet) -> Self {
        Self {
            values: set.values().collect(),
            tops: (0..set.len()).map(|i| set.top_prime(i)).collect(),
            kernels: (0..set.len()).map(|i| set.kernel(i)).collect(),
        }
    }

    pub fn from_set(sieve: &FactorSieve, set: &ArithSet) -> Result<Self> {
        Ok(Self::new(&factor_set(sieve, set)?))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn top_primes(&self) -> &[u64] {
        &self.tops
    }

    /// First value that is not squarefree, if any.
    pub fn first_non_squarefree(&self) -> Option<u64> {
        self.values
            .iter()
            .zip(&self.kernels)
            .find(|(v, k)| v != k)
            .map(|(&v, _)| v)
    }

    fn multiplicities(&self) -> HashMap<u64, (u128, u64)> {
        let mut m: HashMap<u64, (u128, u64)> = HashMap::new();
        for (&v, &t) in self.values.iter().zip(&self.tops) {
            m.entry(v).or_insert((0, t)).0 += 1;
        }
        m
    }
}

/// Count of the tuples that are equal in pairs under one pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingCount {
    /// Positions paired, e.g. `"13|24"` for `n₁ = n₃, n₂ = n₄`.
    pub pairing: String,
    pub count: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionTally {
    pub total: u128,
    pub trivial: u128,
    pub nontrivial: u128,
    pub per_pairing: Vec<PairingCount>,
}

#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        mix64(self.0)
    }
    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut b = [0u8; 8];
            b[..chunk.len()].copy_from_slice(chunk);
            self.write_u64(u64::from_le_bytes(b));
        }
    }
    fn write_u64(&mut self, i: u64) {
        self.0 = mix64(self.0 ^ i).wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
    fn write_u128(&mut self, i: u128) {
        self.write_u64(i as u64);
        self.write_u64((i >> 64) as u64);
    }
}

type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<KeyHasher>>;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// How the four positions are split into two halves.
#[derive(Clone, Copy)]
enum Halving {
    /// `(1,2 | 3,4)`
    Adjacent,
    /// `(1,3 | 2,4)`
    Crossed,
}

fn halving(constraint: TopPrimeConstraint) -> Halving {
    match constraint {
        TopPrimeConstraint::CrossPaired => Halving::Crossed,
        _ => Halving::Adjacent,
    }
}

/// Number of pairs a half enumerates (pairs sharing a top prime when the
/// constraint ties the two positions of the half together).
fn half_pairs(x: &CountingSet, y: &CountingSet, tied: bool) -> u128 {
    if !tied {
        return x.len() as u128 * y.len() as u128;
    }
    let mut by_top: HashMap<u64, u128> = HashMap::new();
    for &t in &y.tops {
        *by_top.entry(t).or_default() += 1;
    }
    x.tops.iter().map(|t| by_top.get(t).copied().unwrap_or(0)).sum()
}

fn for_each_pair(x: &CountingSet, y: &CountingSet, tied: bool, mut f: impl FnMut(usize, usize)) {
    if tied {
        let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
        for (j, &t) in y.tops.iter().enumerate() {
            groups.entry(t).or_default().push(j);
        }
        for (i, t) in x.tops.iter().enumerate() {
            if let Some(g) = groups.get(t) {
                for &j in g {
                    f(i, j);
                }
            }
        }
    } else {
        for i in 0..x.len() {
            for j in 0..y.len() {
                f(i, j);
            }
        }
    }
}

/// Hash key of one half. `swap` reverses the roles of the two positions of
/// the half, used for the right-hand fraction of the crossed ratio split.
type HalfKey = (u64, u128);

#[allow(clippy::too_many_arguments)]
fn half_key(
    kind: EquationKind,
    halving: Halving,
    constraint: TopPrimeConstraint,
    x: &CountingSet,
    i: usize,
    y: &CountingSet,
    j: usize,
    swap: bool,
) -> HalfKey {
    let tag = if constraint == TopPrimeConstraint::AllEqual { x.tops[i] } else { 0 };
    let key = match (kind, halving) {
        (EquationKind::RatioMatch, Halving::Adjacent) => x.values[i] as u128 * y.values[j] as u128,
        (EquationKind::RatioMatch, Halving::Crossed) => {
            let (a, b) = if swap { (y.values[j], x.values[i]) } else { (x.values[i], y.values[j]) };
            let g = gcd(a, b);
            ((a / g) as u128) << 64 | (b / g) as u128
        }
        (EquationKind::SquareProduct, _) => {
            let (a, b) = (x.kernels[i], y.kernels[j]);
            let g = gcd(a, b);
            (a / g) as u128 * (b / g) as u128
        }
    };
    (tag, key)
}

/// Total number of index tuples in `A₁×A₂×A₃×A₄` solving the equation
/// under the constraint, without the trivial split.
pub fn count_total(
    sets: [&CountingSet; 4],
    kind: EquationKind,
    constraint: TopPrimeConstraint,
    budget: u128,
) -> Result<u128> {
    let h = halving(constraint);
    // Positions of each half; for the crossed ratio split the right half is
    // read as the fraction a₄/a₂.
    let (left, right, right_swap) = match h {
        Halving::Adjacent => ((0, 1), (2, 3), false),
        Halving::Crossed => ((0, 2), (1, 3), kind == EquationKind::RatioMatch),
    };
    let tied = constraint != TopPrimeConstraint::None;
    let lp = half_pairs(sets[left.0], sets[left.1], tied);
    let rp = half_pairs(sets[right.0], sets[right.1], tied);
    for (pairs, side) in [(lp, "left"), (rp, "right")] {
        if pairs > budget {
            return Err(Error::BudgetExceeded {
                pairs,
                cap: budget,
                side,
            });
        }
    }
    if lp == 0 || rp == 0 {
        return Ok(0);
    }
    let build = |pos: (usize, usize), swap: bool| {
        let (x, y) = (sets[pos.0], sets[pos.1]);
        let mut map: FastMap<HalfKey, u64> = FastMap::default();
        for_each_pair(x, y, tied, |i, j| {
            *map.entry(half_key(kind, h, constraint, x, i, y, j, swap)).or_default() += 1;
        });
        map
    };
    let (small, large, large_swap) = if lp <= rp {
        (build(left, false), right, right_swap)
    } else {
        (build(right, right_swap), left, false)
    };
    let (x, y) = (sets[large.0], sets[large.1]);
    let mut total = 0u128;
    for_each_pair(x, y, tied, |i, j| {
        if let Some(&c) = small.get(&half_key(kind, h, constraint, x, i, y, j, large_swap)) {
            total += c as u128;
        }
    });
    Ok(total)
}

/// Admissible pairings as position pairs (0-based).
fn pairings(kind: EquationKind) -> &'static [[(usize, usize); 2]] {
    match kind {
        EquationKind::RatioMatch => &[[(0, 2), (1, 3)], [(0, 3), (1, 2)]],
        EquationKind::SquareProduct => &[[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]],
    }
}

fn pairing_label(p: &[(usize, usize); 2]) -> String {
    format!("{}{}|{}{}", p[0].0 + 1, p[0].1 + 1, p[1].0 + 1, p[1].1 + 1)
}

fn constraint_links(c: TopPrimeConstraint) -> &'static [(usize, usize)] {
    match c {
        TopPrimeConstraint::None => &[],
        TopPrimeConstraint::PairedTwoTwo => &[(0, 1), (2, 3)],
        TopPrimeConstraint::CrossPaired => &[(0, 2), (1, 3)],
        TopPrimeConstraint::AllEqual => &[(0, 1), (1, 2), (2, 3)],
    }
}

struct Partition([usize; 4]);

impl Partition {
    fn new() -> Self {
        Partition([0, 1, 2, 3])
    }
    fn find(&self, mut i: usize) -> usize {
        while self.0[i] != i {
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
    fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..4 {
            let r = self.find(i);
            match out.iter_mut().find(|b| self.find(b[0]) == r) {
                Some(b) => b.push(i),
                None => out.push(vec![i]),
            }
        }
        out
    }
}

/// Number of tuples whose values are equal on each block of `values` and
/// whose top primes are equal on each block of `tops` (a coarsening).
fn count_patterned(mults: &[HashMap<u64, (u128, u64)>; 4], values: &Partition, tops: &Partition) -> u128 {
    let value_blocks = values.blocks();
    // For each value block: top prime -> number of ways.
    let weights: Vec<HashMap<u64, u128>> = value_blocks
        .iter()
        .map(|block| {
            let mut w: HashMap<u64, u128> = HashMap::new();
            for (v, &(m0, top)) in &mults[block[0]] {
                let mut ways = m0;
                for &pos in &block[1..] {
                    match mults[pos].get(v) {
                        Some(&(m, _)) => ways *= m,
                        None => {
                            ways = 0;
                            break;
                        }
                    }
                }
                if ways > 0 {
                    *w.entry(top).or_default() += ways;
                }
            }
            w
        })
        .collect();
    let mut result = 1u128;
    for class in tops.blocks() {
        let members: Vec<usize> = (0..value_blocks.len())
            .filter(|&b| class.contains(&value_blocks[b][0]))
            .collect();
        let first = &weights[members[0]];
        let mut s = 0u128;
        for (top, &w0) in first {
            let mut prod = w0;
            for &b in &members[1..] {
                prod *= weights[b].get(top).copied().unwrap_or(0);
                if prod == 0 {
                    break;
                }
            }
            s += prod;
        }
        result *= s;
        if result == 0 {
            break;
        }
    }
    result
}

/// Trivial solutions by inclusion–exclusion over the admissible pairings,
/// plus the count for each pairing on its own.
pub fn count_trivial(
    sets: [&CountingSet; 4],
    kind: EquationKind,
    constraint: TopPrimeConstraint,
) -> (u128, Vec<PairingCount>) {
    let mults = [
        sets[0].multiplicities(),
        sets[1].multiplicities(),
        sets[2].multiplicities(),
        sets[3].multiplicities(),
    ];
    let ps = pairings(kind);
    let mut trivial: i128 = 0;
    let mut per = Vec::new();
    for mask in 1u32..(1 << ps.len()) {
        let mut values = Partition::new();
        for (bit, p) in ps.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                values.union(p[0].0, p[0].1);
                values.union(p[1].0, p[1].1);
            }
        }
        let mut tops = Partition(values.0);
        for &(a, b) in constraint_links(constraint) {
            tops.union(a, b);
        }
        let n = count_patterned(&mults, &values, &tops) as i128;
        if mask.count_ones() % 2 == 1 {
            trivial += n;
        } else {
            trivial -= n;
        }
        if mask.count_ones() == 1 {
            per.push(PairingCount {
                pairing: pairing_label(&ps[mask.trailing_zeros() as usize]),
                count: n as u128,
            });
        }
    }
    (trivial as u128, per)
}

pub fn tally(
    sets: [&CountingSet; 4],
    kind: EquationKind,
    constraint: TopPrimeConstraint,
    budget: u128,
) -> Result<SolutionTally> {
    let total = count_total(sets, kind, constraint, budget)?;
    let (trivial, per_pairing) = count_trivial(sets, kind, constraint);
    debug_assert!(trivial <= total);
    Ok(SolutionTally {
        total,
        trivial,
        nontrivial: total - trivial,
        per_pairing,
    })
}

/// Exact tally over `A₁×A₂×A₃×A₄` with the default pair budget.
pub fn count_fourth_moment(
    sieve: &FactorSieve,
    sets: [&ArithSet; 4],
    kind: EquationKind,
    constraint: TopPrimeConstraint,
) -> Result<SolutionTally> {
    count_fourth_moment_with_budget(sieve, sets, kind, constraint, DEFAULT_PAIR_BUDGET)
}

pub fn count_fourth_moment_with_budget(
    sieve: &FactorSieve,
    sets: [&ArithSet; 4],
    kind: EquationKind,
    constraint: TopPrimeConstraint,
    budget: u128,
) -> Result<SolutionTally> {
    let cs: Vec<CountingSet> = sets
        .iter()
        .map(|s| CountingSet::from_set(sieve, s))
        .collect::<Result<_>>()?;
    tally([&cs[0], &cs[1], &cs[2], &cs[3]], kind, constraint, budget)
}

/// `#{(n₁, n₂) ∈ A×B : P⁺(v₁) = P⁺(v₂)}`.
pub fn top_prime_pairs(a: &CountingSet, b: &CountingSet) -> u128 {
    half_pairs(a, b, true)
}

pub fn count_top_prime_pairs(sieve: &FactorSieve, a: &ArithSet, b: &ArithSet) -> Result<u128> {
    Ok(top_prime_pairs(
        &CountingSet::from_set(sieve, a)?,
        &CountingSet::from_set(sieve, b)?,
    ))
}
