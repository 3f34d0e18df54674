// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random generators and initial states for property checks.
//!
//! Every model is drawn from its own ChaCha8 stream whose seed is derived
//! from a master seed and the model index, so any single model can be
//! rebuilt from `(master_seed, index)` alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::LindbladModel;
use crate::linalg::{frobenius_norm, ComplexMatrix, PureState, C64};

/// Shape of the random model family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomModelSpec {
    pub dim_min: usize,
    pub dim_max: usize,
    pub ops_min: usize,
    pub ops_max: usize,
    /// Upper bound on `||H||_F`.
    pub h_norm_max: f64,
    /// Upper bound on each `||L_k||_F`.
    pub l_norm_max: f64,
}

impl Default for RandomModelSpec {
    fn default() -> Self {
        Self {
            dim_min: 2,
            dim_max: 6,
            ops_min: 1,
            ops_max: 3,
            h_norm_max: 2.0,
            l_norm_max: 2.0,
        }
    }
}

/// A drawn model together with the seed that reproduces it.
#[derive(Debug, Clone)]
pub struct RandomModel {
    pub seed: u64,
    pub model: LindbladModel,
    pub psi0: PureState,
}

/// splitmix64 finalizer over `(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn rescaled(m: ComplexMatrix, norm: f64) -> ComplexMatrix {
    let current = frobenius_norm(&m);
    if current == 0.0 {
        m
    } else {
        m.scale_real(norm / current)
    }
}

/// Gaussian Hermitian matrix rescaled to a uniform Frobenius norm in `(0, max_norm]`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize, max_norm: f64) -> ComplexMatrix {
    let raw = ComplexMatrix::from_vec(dim, (0..dim * dim).map(|_| gaussian_complex(rng)).collect())
        .expect("square");
    let norm = max_norm * (1.0 - rng.random::<f64>());
    rescaled(raw.hermitian_part(), norm)
}

/// Gaussian complex matrix rescaled to a uniform Frobenius norm in `(0, max_norm]`.
pub fn random_operator(rng: &mut impl Rng, dim: usize, max_norm: f64) -> ComplexMatrix {
    let raw = ComplexMatrix::from_vec(dim, (0..dim * dim).map(|_| gaussian_complex(rng)).collect())
        .expect("square");
    let norm = max_norm * (1.0 - rng.random::<f64>());
    rescaled(raw, norm)
}

/// Haar-random pure state.
pub fn random_pure_state(rng: &mut impl Rng, dim: usize) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Draws one model from the stream seeded with `seed`.
pub fn random_model(seed: u64, spec: &RandomModelSpec) -> RandomModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(spec.dim_min..=spec.dim_max);
    let n_ops = rng.random_range(spec.ops_min..=spec.ops_max);
    let h = random_hermitian(&mut rng, dim, spec.h_norm_max);
    let ops = (0..n_ops)
        .map(|_| random_operator(&mut rng, dim, spec.l_norm_max))
        .collect();
    let psi0 = random_pure_state(&mut rng, dim);
    RandomModel {
        seed,
        model: LindbladModel::new(h, ops).expect("Hermitian part is Hermitian"),
        psi0,
    }
}

/// The `index`-th model of the family generated from `master_seed`.
pub fn random_model_indexed(master_seed: u64, index: u64, spec: &RandomModelSpec) -> RandomModel {
    random_model(derive_seed(master_seed, index), spec)
}
