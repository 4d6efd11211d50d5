use serde::{Deserialize, Serialize};

use super::report::FluctuationReport;
use super::scales::PolyScales;
use crate::arith::{factor_set, ArithSet, FactorSieve, LinearFactor, PolySpec};
use crate::error::{Error, Result};
use crate::model::{phase_to_unit, PreparedSet, RmfModel, RmfSample, Twist};
use crate::trials::run_trials;

/// How the partial sums over a polynomial image are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolyEngine {
    /// Linear-split tables when the polynomial splits and its factors stay
    /// within the sieve, the prepared set otherwise.
    Auto,
    /// Factor every value once and evaluate through a prepared set.
    Prepared,
    /// Tabulate `f` on `1..=max|L_i(n)|` per trial and combine the linear
    /// factors of `P(n)`.
    LinearSplit,
}

/// Normalized sums `S_N` at a list of checkpoints `N`, per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSums {
    pub checkpoints: Vec<u64>,
    /// `|A_N|` at each checkpoint.
    pub sizes: Vec<u64>,
    /// `sums[trial][checkpoint]`.
    pub sums: Vec<Vec<f64>>,
    pub engine: PolyEngine,
}

impl ScaleSums {
    /// Restriction to a subset of the checkpoints.
    pub fn select(&self, scales: &[u64]) -> Result<(Vec<u64>, Vec<Vec<f64>>)> {
        let idx: Vec<usize> = scales
            .iter()
            .map(|s| {
                self.checkpoints
                    .binary_search(s)
                    .map_err(|_| Error::invalid(format!("scale {s} was not evaluated")))
            })
            .collect::<Result<_>>()?;
        let sizes = idx.iter().map(|&i| self.sizes[i]).collect();
        let sums = self
            .sums
            .iter()
            .map(|row| idx.iter().map(|&i| row[i]).collect())
            .collect();
        Ok((sizes, sums))
    }
}

fn poly_set(model: RmfModel, poly: &PolySpec, n: u64) -> ArithSet {
    let set = ArithSet::poly_image(poly.clone(), n);
    if model == RmfModel::Rademacher {
        set.squarefree()
    } else {
        set
    }
}

/// Sieve limit that lets `poly_scale_sums` take the fastest route up to
/// `n_max`: the largest linear-factor value when `P` splits, else what the
/// polynomial image itself needs.
pub fn poly_sieve_requirement(poly: &PolySpec, n_max: u64) -> Result<u64> {
    let n = i64::try_from(n_max).map_err(|_| Error::invalid("range too large"))?;
    match poly.linear_factors() {
        Some(split) => {
            let mut need = split.constant.unsigned_abs() as u128;
            for f in &split.factors {
                need = need.max(f.eval(1).unsigned_abs()).max(f.eval(n).unsigned_abs());
            }
            u64::try_from(need.max(2)).map_err(|_| Error::invalid("polynomial values too large"))
        }
        None => ArithSet::poly_image(poly.clone(), n_max).sieve_requirement(),
    }
}

/// `S_N` over `A_N = {n ≤ N : P(n) > 0}` (squarefree `P(n)` for
/// Rademacher) at every checkpoint, for each trial.
#[allow(clippy::too_many_arguments)]
pub fn poly_scale_sums(
    model: RmfModel,
    sieve: &FactorSieve,
    poly: &PolySpec,
    checkpoints: &[u64],
    twist: Twist,
    trials: u64,
    seed: u64,
    engine: PolyEngine,
) -> Result<ScaleSums> {
    twist.check_model(model)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("checkpoints must be nonempty and strictly increasing"));
    }
    let n_max = *checkpoints.last().unwrap();
    let plan = match engine {
        PolyEngine::Auto => LinearPlan::new(model, sieve, poly, n_max).ok(),
        PolyEngine::LinearSplit => Some(LinearPlan::new(model, sieve, poly, n_max)?),
        PolyEngine::Prepared => None,
    };
    let (engine, (sizes, sums)) = match plan {
        Some(plan) => (PolyEngine::LinearSplit, plan.run(sieve, checkpoints, twist, trials, seed)?),
        None => (
            PolyEngine::Prepared,
            prepared_sums(model, sieve, poly, checkpoints, twist, trials, seed)?,
        ),
    };
    Ok(ScaleSums {
        checkpoints: checkpoints.to_vec(),
        sizes,
        sums,
        engine,
    })
}

fn check_sizes(checkpoints: &[u64], sizes: &[u64]) -> Result<()> {
    match checkpoints.iter().zip(sizes).find(|(_, &s)| s == 0) {
        Some((n, _)) => Err(Error::invalid(format!("the set at N = {n} is empty"))),
        None => Ok(()),
    }
}

#[allow(clippy::type_complexity)]
fn prepared_sums(
    model: RmfModel,
    sieve: &FactorSieve,
    poly: &PolySpec,
    checkpoints: &[u64],
    twist: Twist,
    trials: u64,
    seed: u64,
) -> Result<(Vec<u64>, Vec<Vec<f64>>)> {
    let n_max = *checkpoints.last().unwrap();
    let set = factor_set(sieve, &poly_set(model, poly, n_max))?;
    let prepared = PreparedSet::new(model, &set)?;
    let ends: Vec<usize> = checkpoints
        .iter()
        .map(|&c| prepared.elements().partition_point(|e| e.index <= c))
        .collect();
    let sizes: Vec<u64> = ends.iter().map(|&e| e as u64).collect();
    check_sizes(checkpoints, &sizes)?;
    let sums = run_trials(trials, seed, |_, s| {
        let sample = RmfSample::new(model, s);
        let vals = prepared.values(&sample);
        let mut out = Vec::with_capacity(ends.len());
        let mut acc = 0.0;
        let mut pos = 0;
        for &end in &ends {
            while pos < end {
                acc += twist.apply(vals[pos]);
                pos += 1;
            }
            out.push(acc / (end as f64).sqrt());
        }
        out
    })?;
    Ok((sizes, sums))
}

/// Trial-independent data for the linear-split route.
struct LinearPlan {
    model: RmfModel,
    constant: u64,
    factors: Vec<LinearFactor>,
    /// Largest `|L_i(n)|` over the range, and `|c|`.
    table_len: u64,
    /// Bit `n` set when `n` belongs to `A_N`.
    admissible: Vec<u64>,
    /// `n / spf(n)` for `n ≤ table_len`; 0 marks a non-squarefree `n`
    /// under Rademacher so that `f[0] = 0` propagates.
    cofactor: Vec<u32>,
}

fn bit(bits: &[u64], i: u64) -> bool {
    bits[(i >> 6) as usize] >> (i & 63) & 1 == 1
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl LinearPlan {
    fn new(model: RmfModel, sieve: &FactorSieve, poly: &PolySpec, n_max: u64) -> Result<Self> {
        let split = poly
            .linear_factors()
            .ok_or_else(|| Error::invalid(format!("polynomial {poly} does not split into linear factors")))?;
        let n_max_i = i64::try_from(n_max).map_err(|_| Error::invalid("range too large"))?;
        let constant = split.constant.unsigned_abs();
        let mut table_len = constant.max(1);
        for f in &split.factors {
            for n in [1, n_max_i] {
                let v = f.eval(n).unsigned_abs();
                if v > sieve.limit() as u128 {
                    return Err(Error::OutOfRange {
                        value: v,
                        limit: sieve.limit(),
                    });
                }
                table_len = table_len.max(v as u64);
            }
        }
        if constant > sieve.limit() {
            return Err(Error::OutOfRange {
                value: constant as u128,
                limit: sieve.limit(),
            });
        }
        let spf = sieve.raw_table();
        let squarefree = (model == RmfModel::Rademacher).then(|| {
            let mut bits = vec![0u64; (table_len as usize >> 6) + 1];
            bits[0] |= 1 << 1;
            for n in 2..=table_len {
                let p = spf[n as usize] as u64;
                let m = n / p;
                if (m == 1 || spf[m as usize] as u64 != p) && bit(&bits, m) {
                    bits[(n >> 6) as usize] |= 1 << (n & 63);
                }
            }
            bits
        });
        let constant_ok = squarefree.as_ref().is_none_or(|sq| bit(sq, constant.max(1)));
        // Pairs of factors whose values may share a prime.
        let mut pairs = Vec::new();
        for i in 0..split.factors.len() {
            for j in i + 1..split.factors.len() {
                let r = crate::arith::LinearSplit::resultant(&split.factors[i], &split.factors[j]);
                if r.unsigned_abs() != 1 {
                    pairs.push((i, j));
                }
            }
        }
        let mut admissible = vec![0u64; (n_max as usize >> 6) + 1];
        let mut vals = vec![0u64; split.factors.len()];
        if constant_ok {
            for n in 1..=n_max {
                let mut negative = split.constant < 0;
                let mut ok = true;
                for (slot, f) in vals.iter_mut().zip(&split.factors) {
                    let v = f.eval(n as i64);
                    if v == 0 {
                        ok = false;
                        break;
                    }
                    negative ^= v < 0;
                    *slot = v.unsigned_abs() as u64;
                }
                if !ok || negative {
                    continue;
                }
                if let Some(sq) = &squarefree {
                    if !vals.iter().all(|&v| bit(sq, v))
                        || pairs.iter().any(|&(i, j)| gcd(vals[i], vals[j]) != 1)
                        || (constant > 1 && vals.iter().any(|&v| gcd(v, constant) != 1))
                    {
                        continue;
                    }
                }
                admissible[(n >> 6) as usize] |= 1 << (n & 63);
            }
        }
        let mut cofactor = vec![0u32; table_len as usize + 1];
        cofactor[1] = 1;
        for n in 2..=table_len as usize {
            let p = spf[n] as usize;
            let m = n / p;
            cofactor[n] = match &squarefree {
                Some(sq) if !bit(sq, n as u64) => 0,
                _ => m as u32,
            };
        }
        Ok(Self {
            model,
            constant: constant.max(1),
            cofactor,
            factors: split.factors,
            table_len,
            admissible,
        })
    }

    #[allow(clippy::type_complexity)]
    fn run(
        &self,
        sieve: &FactorSieve,
        checkpoints: &[u64],
        twist: Twist,
        trials: u64,
        seed: u64,
    ) -> Result<(Vec<u64>, Vec<Vec<f64>>)> {
        let mut sizes = Vec::with_capacity(checkpoints.len());
        let mut count = 0u64;
        let mut n = 0u64;
        for &c in checkpoints {
            while n < c {
                n += 1;
                count += bit(&self.admissible, n) as u64;
            }
            sizes.push(count);
        }
        check_sizes(checkpoints, &sizes)?;
        let spf = sieve.raw_table();
        let sums = run_trials(trials, seed, |_, s| {
            let sample = RmfSample::new(self.model, s);
            match self.model {
                RmfModel::Rademacher => self.rademacher_trial(spf, &sample, checkpoints, &sizes),
                RmfModel::Steinhaus => self.steinhaus_trial(spf, &sample, checkpoints, &sizes, twist),
            }
        })?;
        Ok((sizes, sums))
    }

    fn rademacher_trial(&self, spf: &[u32], sample: &RmfSample, checkpoints: &[u64], sizes: &[u64]) -> Vec<f64> {
        let len = self.table_len as usize;
        let mut f = vec![0i8; len + 1];
        f[1] = 1;
        for n in 2..=len {
            let m = self.cofactor[n] as usize;
            f[n] = if m == 1 {
                sample.prime_sign(n as u64)
            } else {
                f[spf[n] as usize] * f[m]
            };
        }
        let fc = f[self.constant as usize] as i64;
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut acc = 0i64;
        let mut n = 0u64;
        for (&c, &size) in checkpoints.iter().zip(sizes) {
            while n < c {
                n += 1;
                if bit(&self.admissible, n) {
                    let mut v = fc;
                    for fac in &self.factors {
                        v *= f[fac.eval(n as i64).unsigned_abs() as usize] as i64;
                    }
                    acc += v;
                }
            }
            out.push(acc as f64 / (size as f64).sqrt());
        }
        out
    }

    fn steinhaus_trial(
        &self,
        spf: &[u32],
        sample: &RmfSample,
        checkpoints: &[u64],
        sizes: &[u64],
        twist: Twist,
    ) -> Vec<f64> {
        let len = self.table_len as usize;
        let mut ph = vec![0u64; len + 1];
        for n in 2..=len {
            let m = self.cofactor[n] as usize;
            ph[n] = if m == 1 {
                sample.prime_phase(n as u64)
            } else {
                ph[spf[n] as usize].wrapping_add(ph[m])
            };
        }
        let pc = ph[self.constant as usize];
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut acc = 0.0;
        let mut n = 0u64;
        for (&c, &size) in checkpoints.iter().zip(sizes) {
            while n < c {
                n += 1;
                if bit(&self.admissible, n) {
                    let phase = self
                        .factors
                        .iter()
                        .fold(pc, |a, fac| a.wrapping_add(ph[fac.eval(n as i64).unsigned_abs() as usize]));
                    acc += twist.apply(phase_to_unit(phase));
                }
            }
            out.push(acc / (size as f64).sqrt());
        }
        out
    }
}

/// Per trial, the signed maximum over the scales of `S_{N_l}`.
pub fn run_poly_fluctuation(
    model: RmfModel,
    sieve: &FactorSieve,
    poly: &PolySpec,
    scales: &PolyScales,
    twist: Twist,
    trials: u64,
    seed: u64,
) -> Result<FluctuationReport> {
    let sums = poly_scale_sums(model, sieve, poly, &scales.scales, twist, trials, seed, PolyEngine::Auto)?;
    Ok(FluctuationReport::from_sums(
        scales.scales.clone(),
        sums.sizes,
        sums.sums,
        scales.x.ln().ln().max(0.0).sqrt(),
    ))
}
