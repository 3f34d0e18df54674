// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use std::f64::consts::FRAC_PI_2;

use qsl_core::dynamics::{adjoint_dissipator, convergence_ratio, dissipator};
use qsl_core::linalg::trace_product;
use qsl_core::qsl::bures_angle;
use qsl_core::sampling::{random_model_indexed, random_operator, RandomModelSpec};
use qsl_core::{evolve, evolve_with, propagate, theta_dot_exact, DensityMatrix, EvolveOptions};
use rand::Rng;

#[test]
fn adjoint_duality_on_random_triples() {
    let mut r = common::rng(200);
    for _ in 0..200 {
        let dim = r.random_range(2..=6);
        let a = random_operator(&mut r, dim, 2.0);
        let l = random_operator(&mut r, dim, 2.0);
        let rho = common::random_density(&mut r, dim);
        let lhs = trace_product(&a, &dissipator(&l, &rho).unwrap()).unwrap();
        let rhs = trace_product(&rho, &adjoint_dissipator(&l, &a).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
    }
}

#[test]
fn presets_preserve_trace_hermiticity_positivity() {
    for (name, model, psi0) in common::presets() {
        let traj = evolve(&model, &psi0, 10.0, 1e-4).unwrap();
        assert!(traj.trace_drift <= 1e-9, "{name}: drift {}", traj.trace_drift);
        assert!(traj.max_hermitian_deviation <= 1e-9, "{name}: {}", traj.max_hermitian_deviation);
        assert!(traj.min_eig >= -1e-7, "{name}: min eig {}", traj.min_eig);
    }
}

#[test]
fn random_models_preserve_state_invariants() {
    let spec = RandomModelSpec::default();
    for i in 0..40 {
        let m = random_model_indexed(99, i, &spec);
        let traj = evolve_with(&m.model, &m.psi0, &EvolveOptions::new(5.0, 1e-3)).unwrap();
        assert!(traj.trace_drift <= 1e-9, "model {i}: drift {}", traj.trace_drift);
        assert!(traj.max_hermitian_deviation <= 1e-9, "model {i}");
        assert!(traj.min_eig >= -1e-7, "model {i}: min eig {}", traj.min_eig);
    }
}

#[test]
fn fourth_order_convergence_on_presets() {
    for (name, model, psi0) in common::presets() {
        let ratio = convergence_ratio(&model, &psi0, 2.0, 0.05).unwrap();
        assert!((12.0..=20.0).contains(&ratio), "{name}: ratio {ratio}");
    }
}

/// Compares the closed-form rate with a central difference of the Bures angle
/// taken from a locally re-integrated neighbourhood of each sample.
#[test]
fn theta_dot_matches_finite_difference() {
    const H: f64 = 1e-6;
    for (name, model, psi0) in common::presets() {
        let traj = evolve(&model, &psi0, 5.0, 1e-3).unwrap();
        let rho0 = traj.rho0().clone();
        let interior: Vec<usize> = (0..traj.len())
            .filter(|&k| traj.bures_angles[k] > 0.05 && traj.bures_angles[k] < FRAC_PI_2 - 0.05)
            .collect();
        assert!(interior.len() >= 50, "{name}: only {} interior samples", interior.len());
        let stride = interior.len() / 50;
        for &k in interior.iter().step_by(stride).take(50) {
            let base = traj.states[k].matrix();
            let mid = DensityMatrix::new(propagate(&model, base, H, H).unwrap()).unwrap();
            let end = DensityMatrix::new(propagate(&model, base, 2.0 * H, H).unwrap()).unwrap();
            let theta_mid = bures_angle(&rho0, &mid).unwrap();
            let fd = (bures_angle(&rho0, &end).unwrap() - traj.bures_angles[k]) / (2.0 * H);
            let exact = theta_dot_exact(&model, &rho0, &mid, theta_mid).unwrap();
            assert!((fd - exact).abs() <= 1e-5, "{name} t={}: fd {fd} vs exact {exact}", traj.times[k]);
        }
    }
}

#[test]
fn time_rescaling_rescales_trajectory() {
    let (_, model, psi0) = common::presets().remove(0);
    let lambda = 3.0;
    let fast = model.time_scaled(lambda);
    let a = evolve(&model, &psi0, 3.0, 1e-3).unwrap();
    let b = evolve(&fast, &psi0, 1.0, 1e-3 / lambda).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.bures_angles.iter().zip(&b.bures_angles) {
        assert!((x - y).abs() < 1e-12);
    }
}
