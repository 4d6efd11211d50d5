use rmflab_core::seed::HashStream;
use rmflab_core::stats::{
    cholesky, empirical_covariance, gaussian_max_prob, kolmogorov_distance, normal_quantile, std_normal_cdf,
    wasserstein1_normal, CovarianceMatrix, EmpiricalSample,
};

/// `Φ(x)` by composite Simpson integration of the density from 0.
fn simpson_cdf(x: f64) -> f64 {
    let n = 20_000;
    let h = x / n as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(0.0) + pdf(x);
    for i in 1..n {
        s += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    0.5 + s * h / 3.0
}

#[test]
fn cdf_against_numeric_integration() {
    assert!((simpson_cdf(1.96) - 0.975002).abs() < 1e-6);
    for i in -60..=60 {
        let x = i as f64 * 0.1;
        assert!((std_normal_cdf(x) - simpson_cdf(x)).abs() < 1e-10, "x = {x}");
    }
    assert!((std_normal_cdf(1.96) - 0.975002).abs() < 1e-6);
    assert_eq!(std_normal_cdf(0.0), 0.5);
}

#[test]
fn quantile_against_bisection() {
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if simpson_cdf(mid) < 0.975 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = normal_quantile(0.975).unwrap();
    assert!((q - lo).abs() < 1e-9);
    assert!((q - 1.959964).abs() < 1e-6);
    assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
    assert!(normal_quantile(0.0).is_err() && normal_quantile(1.0).is_err());
}

#[test]
fn cdf_is_monotone_on_a_fine_grid() {
    let mut prev = 0.0;
    for i in 0..=100_000 {
        let v = std_normal_cdf(-8.0 + 16.0 * i as f64 / 100_000.0);
        assert!(v >= prev);
        prev = v;
    }
}

fn normal_draws(seed: u64, t: usize) -> Vec<f64> {
    let mut s = HashStream::new(seed);
    (0..t).map(|_| s.next_normal()).collect()
}

#[test]
fn distances_on_normal_draws() {
    let sample = EmpiricalSample::new(normal_draws(5, 10_000)).unwrap();
    let ks = kolmogorov_distance(&sample, std_normal_cdf);
    assert!(ks > 0.0 && ks < 0.03);
    assert!(wasserstein1_normal(&sample) < 0.05);
    let zero = EmpiricalSample::new(vec![0.0]).unwrap();
    assert_eq!(kolmogorov_distance(&zero, std_normal_cdf), 0.5);
}

#[test]
fn wasserstein_shift_by_direct_recomputation() {
    let t = 2000;
    let planted: Vec<f64> = (0..t).map(|i| normal_quantile((i as f64 + 0.5) / t as f64).unwrap()).collect();
    let base = wasserstein1_normal(&EmpiricalSample::new(planted.clone()).unwrap());
    assert!(base < 1e-12);
    let shifted = EmpiricalSample::new(planted.iter().map(|x| x + 3.0).collect()).unwrap();
    // Coupled with the same quantiles, every term moves by exactly 3.
    let direct: f64 = planted
        .iter()
        .enumerate()
        .map(|(i, x)| (x + 3.0 - normal_quantile((i as f64 + 0.5) / t as f64).unwrap()).abs())
        .sum::<f64>()
        / t as f64;
    assert!((wasserstein1_normal(&shifted) - direct).abs() < 1e-6);
    assert!((wasserstein1_normal(&shifted) - 3.0).abs() < 1e-6);
}

#[test]
fn covariance_of_independent_draws() {
    let t = 100_000;
    let mut s = HashStream::new(17);
    let draws: Vec<Vec<f64>> = (0..t).map(|_| (0..3).map(|_| s.next_normal()).collect()).collect();
    let cov = empirical_covariance(&draws, false).unwrap();
    for i in 0..3 {
        assert!((cov.get(i, i) - 1.0).abs() < 5.0 * (2.0 / t as f64).sqrt());
        for j in 0..3 {
            if i != j {
                assert!(cov.get(i, j).abs() < 5.0 / (t as f64).sqrt());
            }
        }
    }
}

#[test]
fn cholesky_two_by_two() {
    let rho = 0.3;
    let f = cholesky(&CovarianceMatrix::new(2, vec![1.0, rho, rho, 1.0]).unwrap()).unwrap();
    assert_eq!(f.get(0, 0), 1.0);
    assert!((f.get(1, 0) - rho).abs() < 1e-15);
    assert!((f.get(1, 1) - (1.0 - rho * rho).sqrt()).abs() < 1e-15);
    assert_eq!(f.get(0, 1), 0.0);
}

#[test]
fn gaussian_max_matches_product_of_marginals() {
    for k in [1usize, 4, 16] {
        for t in [0.0, 1.0, 2.0] {
            let r = gaussian_max_prob(&CovarianceMatrix::identity(k), t, 100_000, 3 + k as u64).unwrap();
            let exact = std_normal_cdf(t).powi(k as i32);
            assert!((r.probability - exact).abs() <= 5.0 * r.std_error.max(1e-12), "k={k} t={t}");
        }
    }
    let r = gaussian_max_prob(&CovarianceMatrix::identity(3), 40.0, 1000, 1).unwrap();
    assert_eq!(r.probability, 1.0);
}

#[test]
fn correlated_pair_against_closed_form() {
    // P(Y₁ ≤ 0, Y₂ ≤ 0) = 1/4 + asin(ρ)/(2π) for a standard bivariate normal.
    let rho = 0.6;
    let cov = CovarianceMatrix::new(2, vec![1.0, rho, rho, 1.0]).unwrap();
    let r = gaussian_max_prob(&cov, 0.0, 100_000, 9).unwrap();
    let exact = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
    assert!((r.probability - exact).abs() <= 5.0 * r.std_error);
}
