mod common;

use std::collections::BTreeMap;

use common::oracle::{brute_tally, top_prime};
use num_complex::Complex64;
use rmflab_core::energy::{
    clt_diagnostics, compute_a, compute_b, conditional_bound, epsilon_report, normal_comparison_bound,
    theorem_bound, BoundConstants, CltDiagnostics, CoefficientVector, ConditionalInputs, CountingSet, MomentInputs,
    DEFAULT_PAIR_BUDGET,
};
use rmflab_core::stats::slepian_rhs;
use rmflab_core::{enumerate_set, run_trials, EquationKind, FactorSieve, RmfModel, RmfSample, TopPrimeConstraint};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

fn counting(sieve: &FactorSieve, specs: &[&str]) -> Vec<CountingSet> {
    specs.iter().map(|s| CountingSet::from_set(sieve, &s.parse().unwrap()).unwrap()).collect()
}

/// Per-trial `(Σ_p |Z_p|⁴, (Σ_p |Z_p|² - 1)²)` with `Z_p = Σ_l c_l M_{p,l}`,
/// evaluated straight from the sampled values.
fn moment_draws(
    model: RmfModel,
    sieve: &FactorSieve,
    specs: &[&str],
    coeffs: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<(f64, f64)> {
    let sets: Vec<Vec<u64>> = specs
        .iter()
        .map(|s| enumerate_set(sieve, &s.parse().unwrap()).unwrap().iter().map(|e| e.value).collect())
        .collect();
    run_trials(trials, seed, |_, s| {
        let sample = RmfSample::new(model, s);
        let mut z: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (l, set) in sets.iter().enumerate() {
            let w = coeffs[l] / (set.len() as f64).sqrt();
            for &v in set {
                *z.entry(top_prime(v)).or_default() += sample.f_at(sieve, v).unwrap() * w;
            }
        }
        let fourth: f64 = z.values().map(|v| v.norm_sqr().powi(2)).sum();
        let q: f64 = z.values().map(|v| v.norm_sqr()).sum();
        (fourth, (q - 1.0).powi(2))
    })
    .unwrap()
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let m = xs.clone().sum::<f64>() / n;
    let v = xs.map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn assert_mc(model: RmfModel, specs: &[&str], coeffs: &[f64], seed: u64) {
    let sieve = FactorSieve::new(1000).unwrap();
    let sets = counting(&sieve, specs);
    let inp = MomentInputs {
        sets: &sets,
        kind: EquationKind::for_model(model),
        budget: DEFAULT_PAIR_BUDGET,
    };
    let c = CoefficientVector::new(coeffs.to_vec()).unwrap();
    let (a, b) = (compute_a(&inp, &c).unwrap(), compute_b(&inp, &c).unwrap());
    let draws = moment_draws(model, &sieve, specs, coeffs, 100_000, seed);
    let (ma, sa) = mean_se(draws.iter().map(|d| d.0));
    let (mb, sb) = mean_se(draws.iter().map(|d| d.1));
    assert!((ma - a).abs() <= 5.0 * sa.max(1e-12), "{specs:?} A: exact {a}, MC {ma} ± {sa}");
    assert!((mb - b).abs() <= 5.0 * sb.max(1e-12), "{specs:?} B: exact {b}, MC {mb} ± {sb}");
}

#[test]
fn hand_values_of_a_and_b() {
    let sieve = FactorSieve::new(100).unwrap();
    let one = CoefficientVector::uniform(1);
    let s = counting(&sieve, &["list:2,3,5"]);
    let inp = MomentInputs { sets: &s, kind: EquationKind::SquareProduct, budget: DEFAULT_PAIR_BUDGET };
    // Three all-equal-top tuples (p,p,p,p) over 3² = 9.
    assert!((compute_a(&inp, &one).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    // 9/9 - 2·3/3 + 1.
    assert!(compute_b(&inp, &one).unwrap().abs() < 1e-12);
    let s = counting(&sieve, &["list:2,4"]);
    let inp = MomentInputs { sets: &s, kind: EquationKind::RatioMatch, budget: DEFAULT_PAIR_BUDGET };
    // Σ|M_p|² - 1 = cos θ₂ and E cos² θ = 1/2.
    assert!((compute_b(&inp, &one).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn a_and_b_against_monte_carlo_on_hand_sets() {
    assert_mc(RmfModel::Rademacher, &["list:2,3,5"], &[1.0], 11);
    assert_mc(RmfModel::Steinhaus, &["list:2,4"], &[1.0], 12);
}

#[test]
fn a_and_b_against_monte_carlo_on_intervals() {
    assert_mc(RmfModel::Rademacher, &["interval:80,40/sf"], &[1.0], 21);
    assert_mc(RmfModel::Steinhaus, &["interval:60,30"], &[1.0], 22);
    assert_mc(RmfModel::Rademacher, &["interval:60,30/sf", "interval:120,40/sf"], &[0.6, 0.8], 23);
    assert_mc(RmfModel::Steinhaus, &["interval:50,20", "poly:7:0,1,1"], &[0.8, -0.6], 24);
}

#[test]
fn epsilons_against_brute_force() {
    let sieve = FactorSieve::new(400).unwrap();
    for (kind, specs) in [
        (EquationKind::SquareProduct, ["interval:60,25/sf", "interval:100,30/sf"]),
        (EquationKind::RatioMatch, ["interval:60,25", "interval:100,30"]),
    ] {
        let sets = counting(&sieve, &specs);
        let vals: Vec<Vec<u64>> = specs
            .iter()
            .map(|s| enumerate_set(&sieve, &s.parse().unwrap()).unwrap().iter().map(|e| e.value).collect())
            .collect();
        let inp = MomentInputs { sets: &sets, kind, budget: DEFAULT_PAIR_BUDGET };
        let rep = epsilon_report(&inp).unwrap();
        let paired = kind.paired_constraint();
        let (mut e1, mut e1p, mut e2) = (0.0f64, 0.0f64, 0.0f64);
        for code in 0..16usize {
            let t = [code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1];
            let s = [&vals[t[0]][..], &vals[t[1]][..], &vals[t[2]][..], &vals[t[3]][..]];
            let norm = t.iter().map(|&l| vals[l].len() as f64).product::<f64>().sqrt();
            e1 = e1.max(brute_tally(s, kind, paired).nontrivial() as f64 / norm);
            e1p = e1p.max(brute_tally(s, kind, TopPrimeConstraint::AllEqual).nontrivial() as f64 / norm);
        }
        for a in &vals {
            for b in &vals {
                let same = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y)))
                    .filter(|&(x, y)| top_prime(x) == top_prime(y))
                    .count() as f64;
                e2 = e2.max(same / (a.len() * b.len()) as f64);
            }
        }
        assert!(rel_close(rep.eps1, e1, 1e-12) && rep.eps1 > 0.0, "{kind}: {} vs {e1}", rep.eps1);
        assert!(rel_close(rep.eps1prime, e1p, 1e-12) || (rep.eps1prime == 0.0 && e1p == 0.0));
        assert!(rel_close(rep.eps2, e2, 1e-12));
        assert!(rep.eps1prime <= rep.eps1);
    }
}

fn diag(a: f64, b: f64, k: usize, eps: [f64; 3], max_ratio: f64, iii_b: bool) -> CltDiagnostics {
    CltDiagnostics { a, b, k, eps1: eps[0], eps1prime: eps[1], eps2: eps[2], max_ratio, iii_b }
}

#[test]
fn bound_arithmetic_on_hand_instances() {
    let c = BoundConstants::default();

    // Rademacher {2,3,5}: only diagonal primes share a top prime, so
    // ε₁ = ε₁′ = 0, ε₂ = 3/9, one set.
    let sieve = FactorSieve::new(100).unwrap();
    let s = counting(&sieve, &["list:2,3,5"]);
    let inp = MomentInputs { sets: &s, kind: EquationKind::SquareProduct, budget: DEFAULT_PAIR_BUDGET };
    let d = clt_diagnostics(&inp, &CoefficientVector::uniform(1)).unwrap();
    assert_eq!((d.eps1, d.eps1prime, d.k, d.iii_b), (0.0, 0.0, 1, true));
    assert!(rel_close(d.eps2, 1.0 / 3.0, 1e-12));
    let hand = (1.0f64 / 3.0).powf(0.2);
    assert!(rel_close(theorem_bound(&d, 0.0, &c).bound, hand, 1e-12));
    assert!(rel_close(theorem_bound(&d, 2.0, &c).bound, hand / (1.0 + 2f64.powf(3.2)), 1e-12));

    // ε = 10⁻⁴, k = 2, maxRatio = 1, not disjoint.
    let d = diag(0.0, 0.0, 2, [1e-4; 3], 1.0, false);
    let bracket = 1e-4 + 4.0 * 2e-4 + 4.0 * 1e-4 + 2.0;
    let v = theorem_bound(&d, 0.0, &c);
    assert!(rel_close(v.bracket, bracket, 1e-12));
    assert!(rel_close(v.bound, bracket.powf(0.2), 1e-12));
    // Rounded display value; the exact check is the line above.
    assert!((v.bound - 1.1487).abs() < 5e-4);
    let scaled = theorem_bound(&d, -1.5, &BoundConstants { theorem: 2.5, ..c });
    assert!(rel_close(scaled.bound, 2.5 * bracket.powf(0.2) / (1.0 + 1.5f64.powf(3.2)), 1e-12));

    // Conditional bound: k = 3, ε₁′ = 10⁻⁴, ε₂ = 3·10⁻⁴, maxRatio = 1/2.
    let inp = ConditionalInputs { eps1prime: 1e-4, eps2: 3e-4, k: 3, iii_b: false, max_ratio: 0.5 };
    let cb = conditional_bound(&inp, 0.7, &c);
    let core = 3.0 * 4e-4f64.sqrt();
    assert!(rel_close(cb.prob_defect, core + 3.0 * 0.5 * core.powf(1.0 / 12.0), 1e-12));
    assert!(rel_close(cb.kolmogorov_bound, core.powf(0.1) / (1.0 + 0.7f64.powf(3.2)), 1e-12));
    let cb = conditional_bound(&ConditionalInputs { iii_b: true, ..inp }, 0.0, &c);
    assert!(rel_close(cb.prob_defect, core, 1e-12));

    // Comparison bound at k = 1 reduces to single-scale arithmetic.
    let d = diag(0.0, 0.0, 1, [2e-3, 1e-3, 5e-2], 0.0, true);
    let nb = normal_comparison_bound(&d, 0.3, 0.25, &c).unwrap();
    assert!(rel_close(nb.unconditional, 4.0 * (2e-3f64 + 1e-3 + 5e-2).powf(0.1), 1e-12));
    assert!(rel_close(nb.conditional, 4.0 * (1e-3f64 + 5e-2).sqrt().powf(0.05), 1e-12));
    let d2 = diag(0.0, 0.0, 2, [2e-3, 1e-3, 5e-2], 0.5, false);
    let nb = normal_comparison_bound(&d2, 0.3, 0.25, &c).unwrap();
    let unc: f64 = 4.0 * (2e-3 + 1e-3 + 5e-2) + 2.0 * 0.5;
    assert!(rel_close(nb.unconditional, 2f64.powf(1.5) * 4.0 * unc.powf(1.0 / 15.0), 1e-12));

    // Slepian comparison at k = 10⁴, δ = 10⁻², ε = 10⁻⁴.
    let k = 1e4f64;
    let hand = (-(k.powf(5e-4)) / k.ln().sqrt()).exp() + 10f64.powf(-0.08);
    assert!(rel_close(slepian_rhs(10_000, 1e-2, 1e-4, 1.0).unwrap(), hand, 1e-12));
    assert!(slepian_rhs(10_000, 2e-2, 1e-4, 1.0).is_err());
}

#[test]
fn theorem_bound_is_monotone() {
    let c = BoundConstants::default();
    let base = diag(0.0, 0.0, 3, [1e-3, 5e-4, 2e-2], 0.7, false);
    let at = |d: &CltDiagnostics, x: f64| theorem_bound(d, x, &c).bound;
    let mut prev = f64::INFINITY;
    for i in 0..50 {
        let x = i as f64 * 0.2;
        let v = at(&base, x);
        assert!(v <= prev && (at(&base, -x) - v).abs() < 1e-15);
        prev = v;
    }
    for bump in 0..3 {
        let mut d = base.clone();
        match bump {
            0 => d.eps1 *= 2.0,
            1 => d.eps1prime *= 2.0,
            _ => d.eps2 *= 2.0,
        }
        assert!(at(&d, 0.4) >= at(&base, 0.4));
    }
}
