use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kantorovich::constructions::{birkhoff_decompose, gcd_construct, DEFAULT_LCM_GUARD};
use kantorovich::instance::{genericity_check, ScanMode, DEFAULT_GENERICITY_TOL};
use kantorovich::solve;
use kantorovich_bench::{points, random, shifted_mixture, square_optimum};

fn bench_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    for (m, n) in [(10, 10), (20, 30), (50, 50), (7, 500)] {
        let inst = random(m, n);
        g.bench_with_input(
            BenchmarkId::new("random", format!("{m}x{n}")),
            &inst,
            |b, i| b.iter(|| solve(black_box(i))),
        );
    }
    let inst = points(20, 30, 1.0);
    g.bench_function("points/20x30/p1", |b| b.iter(|| solve(black_box(&inst))));
    g.bench_function("gcd/20x30/p1", |b| {
        b.iter(|| gcd_construct(black_box(&inst), DEFAULT_LCM_GUARD).unwrap())
    });
    g.finish();
}

fn bench_genericity(c: &mut Criterion) {
    let mut g = c.benchmark_group("genericity");
    g.sample_size(10);
    for (m, n) in [(10, 50), (20, 200)] {
        let inst = random(m, n);
        g.bench_with_input(
            BenchmarkId::new("full", format!("{m}x{n}")),
            &inst,
            |b, i| {
                b.iter(|| genericity_check(black_box(i), DEFAULT_GENERICITY_TOL, ScanMode::Full))
            },
        );
    }
    let inst = random(50, 500);
    g.bench_function("sampled/50x500/1e6", |b| {
        b.iter(|| {
            genericity_check(
                black_box(&inst),
                DEFAULT_GENERICITY_TOL,
                ScanMode::Sampled {
                    budget: 1_000_000,
                    seed: 0,
                },
            )
        })
    });
    g.finish();
}

fn bench_birkhoff(c: &mut Criterion) {
    let mut g = c.benchmark_group("birkhoff");
    for (n, k) in [(20, 5), (100, 10)] {
        let plan = shifted_mixture(n, k);
        g.bench_with_input(
            BenchmarkId::new("mixture", format!("{n}x{k}")),
            &plan,
            |b, p| b.iter(|| birkhoff_decompose(black_box(p)).unwrap()),
        );
    }
    let plan = square_optimum(100);
    g.bench_function("permutation/100", |b| {
        b.iter(|| birkhoff_decompose(black_box(&plan)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_solve, bench_genericity, bench_birkhoff);
criterion_main!(benches);
