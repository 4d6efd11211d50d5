use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rmflab_core::energy::{tally, CountingSet, DEFAULT_PAIR_BUDGET};
use rmflab_core::experiments::{poly_scale_sums, PolyEngine};
use rmflab_core::model::monte_carlo_sums;
use rmflab_core::{ArithSet, EquationKind, FactorSieve, PolySpec, RmfModel, TopPrimeConstraint, Twist};

fn sieve(c: &mut Criterion) {
    c.bench_function("sieve 1e6", |b| b.iter(|| FactorSieve::new(black_box(1_000_000)).unwrap()));
}

fn counting(c: &mut Criterion) {
    let sieve = FactorSieve::new(20_000).unwrap();
    let set = ArithSet::interval(20_000, 2000).squarefree();
    let cs = CountingSet::from_set(&sieve, &set).unwrap();
    c.bench_function("square tally, interval 2000", |b| {
        b.iter(|| {
            tally([&cs, &cs, &cs, &cs], EquationKind::SquareProduct, TopPrimeConstraint::None, DEFAULT_PAIR_BUDGET)
                .unwrap()
        })
    });
}

fn monte_carlo(c: &mut Criterion) {
    let sieve = FactorSieve::new(100_000).unwrap();
    let set = ArithSet::interval(100_000, 10_000).squarefree();
    c.bench_function("monte carlo, 10000 terms x 100 trials", |b| {
        b.iter(|| monte_carlo_sums(RmfModel::Rademacher, &sieve, &set, Twist::Identity, 100, 1).unwrap())
    });
}

fn poly_scales(c: &mut Criterion) {
    let sieve = FactorSieve::new(1_000_002).unwrap();
    let p = PolySpec::new(vec![0, 1, 1]).unwrap();
    let cps = [1000, 10_000, 100_000, 1_000_000];
    let mut g = c.benchmark_group("poly scale sums, N = 1e6 x 10 trials");
    g.sample_size(10);
    for engine in [PolyEngine::LinearSplit, PolyEngine::Prepared] {
        g.bench_function(format!("{engine:?}"), |b| {
            b.iter(|| poly_scale_sums(RmfModel::Rademacher, &sieve, &p, &cps, Twist::Identity, 10, 1, engine).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sieve, counting, monte_carlo, poly_scales);
criterion_main!(benches);
