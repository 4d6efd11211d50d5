mod common;

use common::oracle::{big_omega, is_squarefree, tau3, top_prime, trial_factor};
use rmflab_core::arith::{
    count_omega_above, count_omega_exceed, count_squarefree_rough, psi_poly_smooth, psi_smooth, tau3_interval_sum,
};
use rmflab_core::model::{conditional_decompose, martingale_slices};
use rmflab_core::{enumerate_set, ArithSet, FactorSieve, PolySpec};

fn poly(c: &[i64]) -> PolySpec {
    PolySpec::new(c.to_vec()).unwrap()
}

#[test]
fn sieve_agrees_with_trial_division() {
    let sieve = FactorSieve::new(20_000).unwrap();
    for n in 2..=20_000u64 {
        let f = trial_factor(n);
        assert_eq!(sieve.spf(n).unwrap(), f[0].0);
        assert_eq!(sieve.factorize(n).unwrap().collect::<Vec<_>>(), f);
        assert_eq!(sieve.largest_prime_factor(n).unwrap(), top_prime(n));
        assert_eq!(sieve.omega_big(n).unwrap(), big_omega(n));
        assert_eq!(sieve.is_squarefree(n).unwrap(), is_squarefree(n));
        assert_eq!(sieve.is_prime(n).unwrap(), f == [(n, 1)]);
        let kernel: u64 = f.iter().filter(|x| x.1 % 2 == 1).map(|x| x.0).product();
        assert_eq!(sieve.squarefree_kernel(n).unwrap(), kernel);
    }
    for n in 1..=400u64 {
        assert_eq!(sieve.tau3(n).unwrap(), tau3(n));
    }
}

#[test]
fn lemma_counts_by_direct_loops() {
    let sieve = FactorSieve::new(1_000_000).unwrap();
    // Ω(n) > 2 on 1..=20: 8, 12, 16, 18, 20.
    assert_eq!(count_omega_above(&sieve, 20, 20, 2.0).unwrap(), 5);
    assert_eq!((1..=20u64).filter(|&n| big_omega(n) > 2).count(), 5);
    let eps = 2.0 / 20f64.ln().ln() - 1.0;
    assert_eq!(count_omega_exceed(&sieve, 20, 20, eps).unwrap().0, 5);

    let x = poly(&[0, 1]);
    assert_eq!(tau3_interval_sum(&sieve, &x, 0, 5).unwrap(), 16);
    assert_eq!((1..=5).map(tau3).sum::<u64>(), 16);
    assert_eq!(tau3_interval_sum(&sieve, &poly(&[1, 0, 1]), 0, 3).unwrap(), 15);
    let q = poly(&[3, 1, 2]);
    let direct: u64 = (41..=60u64).map(|n| tau3(2 * n * n + n + 3)).sum();
    assert_eq!(tau3_interval_sum(&sieve, &q, 40, 20).unwrap(), direct);

    assert_eq!(psi_smooth(&sieve, 100, 5).unwrap(), 34);
    assert_eq!((1..=100u64).filter(|&n| top_prime(n) <= 5).count(), 34);
    assert_eq!(psi_smooth(&sieve, 10, 2).unwrap(), 4);
    assert_eq!(psi_smooth(&sieve, 77, 77).unwrap(), 77);

    assert_eq!(psi_poly_smooth(&sieve, &poly(&[0, 1, 1]), 10, 5).unwrap().count, 7);
    assert_eq!((1..=10u64).filter(|&n| top_prime(n * (n + 1)) <= 5).count(), 7);
    assert_eq!(psi_poly_smooth(&sieve, &poly(&[1, 0, 1]), 5, 2).unwrap().count, 1);
    assert_eq!(
        psi_poly_smooth(&sieve, &poly(&[0, 1]), 300, 7).unwrap().count,
        psi_smooth(&sieve, 300, 7).unwrap()
    );
}

#[test]
fn omega_excess_on_a_large_interval() {
    let sieve = FactorSieve::new(1_000_000).unwrap();
    let (n, h, eps) = (1_000_000u64, 100_000u64, 0.5);
    let threshold = 1.5 * (n as f64).ln().ln();
    let direct = (n - h + 1..=n).filter(|&m| big_omega(m) as f64 > threshold).count() as u64;
    let (count, rate) = count_omega_exceed(&sieve, n, h, eps).unwrap();
    assert_eq!(count, direct);
    assert!((rate - (1.5 * 1.5f64.ln() - 0.5)).abs() < 1e-15);
    // A threshold above log₂ N leaves nothing.
    assert_eq!(count_omega_exceed(&sieve, n, h, 100.0).unwrap().0, 0);
}

#[test]
fn squarefree_rough_by_enumeration() {
    let sieve = FactorSieve::new(1000).unwrap();
    let direct = (51..=100u64).filter(|&m| is_squarefree(m) && top_prime(m) as f64 > 10.0).count() as u64;
    assert_eq!(count_squarefree_rough(&sieve, 100, 50, 0.5).unwrap(), direct);
    assert_eq!(count_squarefree_rough(&sieve, 100, 50, 1.0).unwrap(), 0);
    let sf = (51..=100u64).filter(|&m| is_squarefree(m)).count() as u64;
    assert_eq!(count_squarefree_rough(&sieve, 100, 50, 0.0).unwrap(), sf);
}

#[test]
fn squarefree_density_of_a_long_interval() {
    let sieve = FactorSieve::new(1_000_000).unwrap();
    let set = ArithSet::interval(1_000_000, 100_000).squarefree();
    let count = enumerate_set(&sieve, &set).unwrap().len() as f64;
    let density = 6.0 / std::f64::consts::PI.powi(2);
    assert!((count / 1e5 - density).abs() < 0.005);
}

#[test]
fn slices_and_decomposition_by_enumeration() {
    let sieve = FactorSieve::new(1000).unwrap();
    let set = ArithSet::interval(100, 10).squarefree();
    let slices = martingale_slices(&sieve, &set).unwrap();
    let mut keys: Vec<u64> = (91..=100u64).filter(|&n| is_squarefree(n)).map(top_prime).collect();
    keys.sort_unstable();
    keys.dedup();
    assert_eq!(slices.by_top_prime.keys().copied().collect::<Vec<_>>(), keys);

    let set = ArithSet::interval(1000, 100);
    let d = conditional_decompose(&sieve, &set, 31).unwrap();
    let smooth: Vec<u64> = d.smooth.iter().map(|e| e.value).collect();
    assert_eq!(smooth, (901..=1000u64).filter(|&n| top_prime(n) <= 31).collect::<Vec<_>>());
    for (&p, els) in &d.rough {
        for r in els {
            assert_eq!(top_prime(r.element.value), p);
            assert_eq!(r.cofactor * p, r.element.value);
        }
    }
    let rough: usize = d.rough.values().map(Vec::len).sum();
    assert_eq!(rough + smooth.len(), 100);
    // 37² > 1000, so no value has two prime factors above 31.
    assert!(d.unique_large_prime);
}
