use std::hint::black_box;

use cirlan_core::likelihood::{loglr, TransitionKernel};
use cirlan_core::sim::{exact_transition_sample, simulate_path};
use cirlan_core::specfun::{log_bessel_i_scaled, log_gamma};
use cirlan_core::{CirParams, RngStream, SamplingScheme};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn params() -> CirParams {
    CirParams::new(1.1, 0.5, 0.1, 1.0).unwrap()
}

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("log_bessel_i_scaled");
    // One point per evaluation regime: series, uniform, large argument.
    for &(nu, x) in &[(10.0, 5.0), (10.0, 200.0), (10.0, 2_000.0)] {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("nu={nu},x={x}")),
            &(nu, x),
            |b, &(nu, x)| b.iter(|| log_bessel_i_scaled(black_box(nu), black_box(x)).unwrap()),
        );
    }
    g.finish();
    c.bench_function("log_gamma", |b| {
        b.iter(|| log_gamma(black_box(17.3)).unwrap())
    });
}

fn density(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("log_density");
    for &dt in &[0.002, 0.02, 1.0] {
        let k = TransitionKernel::new(&p, dt);
        g.bench_with_input(BenchmarkId::from_parameter(dt), &k, |b, k| {
            b.iter(|| k.log_density(black_box(2.0), black_box(2.05)))
        });
    }
    g.finish();
}

fn sampler(c: &mut Criterion) {
    let p = params();
    let mut rng = RngStream::new(1, 0).generator();
    c.bench_function("exact_transition_sample", |b| {
        b.iter(|| exact_transition_sample(&p, black_box(2.0), 0.02, &mut rng))
    });
}

fn path_ratio(c: &mut Criterion) {
    let p0 = params();
    let p1 = CirParams::new(1.2, 0.6, 0.1, 1.0).unwrap();
    let scheme = SamplingScheme::new(5000, 0.02).unwrap();
    let path = simulate_path(&p0, &scheme, &RngStream::new(2, 0));
    c.bench_function("simulate_path_5000", |b| {
        b.iter(|| simulate_path(&p0, &scheme, &RngStream::new(3, 0)))
    });
    c.bench_function("loglr_5000", |b| {
        b.iter(|| loglr(&p0, &p1, black_box(&path)).unwrap())
    });
}

criterion_group!(benches, special_functions, density, sampler, path_ratio);
criterion_main!(benches);
