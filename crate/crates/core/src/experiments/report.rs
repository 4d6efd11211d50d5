use serde::{Deserialize, Serialize};

/// Multiples `θ` of `√(2 ln k)` at which exceedance is reported.
pub const EXCEEDANCE_THETAS: [f64; 3] = [0.5, 0.8, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub theta: f64,
    pub threshold: f64,
    /// Fraction of trials with `max_l S_l > threshold`.
    pub fraction: f64,
}

/// Per-trial maxima over a family of normalized sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationReport {
    pub k: usize,
    pub scales: Vec<u64>,
    pub set_sizes: Vec<u64>,
    pub trials: u64,
    /// `sums[trial][l]`.
    pub sums: Vec<Vec<f64>>,
    pub max_signed: Vec<f64>,
    pub max_abs: Vec<f64>,
    pub mean_max: f64,
    pub std_error_max: f64,
    /// `√(2 ln k)`.
    pub lil_normalizer: f64,
    /// `√(ln ln X)` for polynomial images, `√(ln(X/H(X)))` for short intervals.
    pub scale_normalizer: f64,
    pub exceedance: Vec<Exceedance>,
}

impl FluctuationReport {
    pub fn from_sums(scales: Vec<u64>, set_sizes: Vec<u64>, sums: Vec<Vec<f64>>, scale_normalizer: f64) -> Self {
        let k = scales.len();
        let trials = sums.len() as u64;
        let max_signed: Vec<f64> = sums
            .iter()
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let max_abs: Vec<f64> = sums
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).fold(0.0, f64::max))
            .collect();
        let (mean_max, std_error_max) = mean_and_se(&max_signed);
        let lil_normalizer = (2.0 * (k as f64).ln()).sqrt();
        let exceedance = EXCEEDANCE_THETAS
            .iter()
            .map(|&theta| {
                let threshold = theta * lil_normalizer;
                let hits = max_signed.iter().filter(|&&m| m > threshold).count();
                Exceedance {
                    theta,
                    threshold,
                    fraction: hits as f64 / trials as f64,
                }
            })
            .collect();
        Self {
            k,
            scales,
            set_sizes,
            trials,
            sums,
            max_signed,
            max_abs,
            mean_max,
            std_error_max,
            lil_normalizer,
            scale_normalizer,
            exceedance,
        }
    }
}

/// Sample mean and its standard error (`s/√T`, zero for a single value).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}
