// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use qsl_core::models::{
    dephasing_model, product_model_dense, spontaneous_emission_model, DephasingQubitParams,
    LocalDissipation, ProductModelParams,
};
use qsl_core::{ComplexMatrix, LindbladModel, PureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The three named presets at representative parameters.
pub fn presets() -> Vec<(&'static str, LindbladModel, PureState)> {
    let (d, dpsi) = dephasing_model(&DephasingQubitParams {
        omega: 1.0,
        gamma: 1.0,
        theta: std::f64::consts::FRAC_PI_4,
    })
    .unwrap();
    let (e, epsi) = spontaneous_emission_model(1.0).unwrap();
    let (p, ppsi) = product_model_dense(&ProductModelParams {
        n: 2,
        omega: 1.0,
        gamma: 0.5,
        theta: std::f64::consts::FRAC_PI_4,
        dissipation: LocalDissipation::EverySite,
    })
    .unwrap();
    vec![("dephasing", d, dpsi), ("emission", e, epsi), ("product", p, ppsi)]
}

/// Random positive semidefinite unit-trace matrix.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let a = qsl_core::sampling::random_operator(rng, dim, 1.0);
    let rho = a.matmul(&a.adjoint()).unwrap();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}
