use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric `k × k` matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    pub fn new(k: usize, entries: Vec<f64>) -> Result<Self> {
        if k == 0 || entries.len() != k * k {
            return Err(Error::invalid(format!("need {k}x{k} entries, got {}", entries.len())));
        }
        let m = Self { k, entries };
        for i in 0..k {
            if m.get(i, i) < 0.0 {
                return Err(Error::invalid(format!("negative variance at {i}")));
            }
            for j in 0..i {
                if (m.get(i, j) - m.get(j, i)).abs() > 1e-12 {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn identity(k: usize) -> Self {
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1.0;
        }
        Self { k, entries }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k + j]
    }

    /// Largest off-diagonal entry, or `0` for `k = 1`.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for i in 0..self.k {
            for j in 0..self.k {
                if i != j {
                    m = m.max(self.get(i, j));
                }
            }
        }
        if m.is_finite() {
            m
        } else {
            0.0
        }
    }
}

/// Second moments of `T ≥ 2` draws of a `k`-vector: raw `E XᵢXⱼ`, or
/// mean-subtracted when `centered`.
pub fn empirical_covariance(draws: &[Vec<f64>], centered: bool) -> Result<CovarianceMatrix> {
    if draws.len() < 2 {
        return Err(Error::invalid("covariance needs at least two draws"));
    }
    let k = draws[0].len();
    if k == 0 || draws.iter().any(|d| d.len() != k) {
        return Err(Error::invalid("draws must be nonempty vectors of equal length"));
    }
    let t = draws.len() as f64;
    let mean: Vec<f64> = if centered {
        (0..k).map(|i| draws.iter().map(|d| d[i]).sum::<f64>() / t).collect()
    } else {
        vec![0.0; k]
    };
    let mut entries = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = draws.iter().map(|d| (d[i] - mean[i]) * (d[j] - mean[j])).sum();
            let v = if centered { s / (t - 1.0) } else { s / t };
            entries[i * k + j] = v;
            entries[j * k + i] = v;
        }
    }
    Ok(CovarianceMatrix { k, entries })
}

/// Lower-triangular factor `L` with `L Lᵀ = Σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CholeskyFactor {
    k: usize,
    lower: Vec<f64>,
    /// Largest magnitude of a slightly negative pivot that was clamped to 0.
    pub ridge: f64,
}

impl CholeskyFactor {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.k + j]
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    /// `L z`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.k) {
            *o = (0..=i).map(|j| self.lower[i * self.k + j] * z[j]).sum();
        }
    }
}

/// Pivots below `-1e-10` are rejected; pivots in `[-1e-10, 0]` are clamped
/// to zero and reported through `ridge`.
pub fn cholesky(cov: &CovarianceMatrix) -> Result<CholeskyFactor> {
    let k = cov.k;
    let mut l = vec![0.0; k * k];
    let mut ridge: f64 = 0.0;
    for j in 0..k {
        let d = cov.get(j, j) - (0..j).map(|m| l[j * k + m] * l[j * k + m]).sum::<f64>();
        if d < -1e-10 {
            return Err(Error::NotPositiveSemidefinite { row: j, pivot: d });
        }
        let ljj = if d <= 0.0 {
            ridge = ridge.max(-d);
            0.0
        } else {
            d.sqrt()
        };
        l[j * k + j] = ljj;
        for i in j + 1..k {
            let s = cov.get(i, j) - (0..j).map(|m| l[i * k + m] * l[j * k + m]).sum::<f64>();
            l[i * k + j] = if ljj > 0.0 { s / ljj } else { 0.0 };
        }
    }
    Ok(CholeskyFactor { k, lower: l, ridge })
}
