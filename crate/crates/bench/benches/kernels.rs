// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::FRAC_PI_4;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsl_core::linalg::eigenvalues_hermitian;
use qsl_core::models::{product_model_dense, product_quantities_analytic, spontaneous_emission_model};
use qsl_core::{compute_quantities, evolve, t_qsl, LocalDissipation, ProductModelParams};

fn product(n: usize) -> ProductModelParams {
    ProductModelParams { n, omega: 0.1, gamma: 10.0, theta: FRAC_PI_4, dissipation: LocalDissipation::EverySite }
}

fn bench_evolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve_rk4");
    let (m, psi) = spontaneous_emission_model(1.0).unwrap();
    group.bench_function("emission_1000_steps", |b| b.iter(|| evolve(black_box(&m), &psi, 1.0, 1e-3).unwrap()));
    for n in [2, 3, 4] {
        let (m, psi) = product_model_dense(&product(n)).unwrap();
        group.bench_with_input(BenchmarkId::new("product_100_steps", n), &n, |b, _| {
            b.iter(|| evolve(black_box(&m), &psi, 0.1, 1e-3).unwrap())
        });
    }
    group.finish();
}

fn bench_quantities(c: &mut Criterion) {
    let mut group = c.benchmark_group("quantities");
    for n in [2, 4, 6] {
        let (m, psi) = product_model_dense(&product(n)).unwrap();
        group.bench_with_input(BenchmarkId::new("dense", n), &n, |b, _| {
            b.iter(|| compute_quantities(black_box(&m), &psi).unwrap())
        });
    }
    group.bench_function("analytic_n16384", |b| b.iter(|| product_quantities_analytic(black_box(&product(16384))).unwrap()));
    group.finish();
}

fn bench_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues_hermitian");
    for n in [2, 4, 6] {
        let (m, psi) = product_model_dense(&product(n)).unwrap();
        let rho = evolve(&m, &psi, 0.05, 1e-3).unwrap().final_state().matrix().clone();
        group.bench_with_input(BenchmarkId::from_parameter(1usize << n), &rho, |b, rho| {
            b.iter(|| eigenvalues_hermitian(black_box(rho)).unwrap())
        });
    }
    group.finish();
}

fn bench_t_qsl(c: &mut Criterion) {
    let q = product_quantities_analytic(&product(64)).unwrap();
    c.bench_function("t_qsl", |b| b.iter(|| t_qsl(black_box(&q), black_box(0.7)).unwrap()));
}

criterion_group!(benches, bench_evolve, bench_quantities, bench_eigen, bench_t_qsl);
criterion_main!(benches);
