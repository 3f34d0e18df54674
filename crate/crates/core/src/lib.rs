// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Geometric quantum speed limits for Markovian open systems.
//!
//! The crate evolves Lindblad master equations with a fixed-step RK4
//! integrator, tracks the Bures angle to the initial pure state, and compares
//! first-passage times against the speed-limit time
//! `T = 2 sin^2(Theta) phi(x) / E` built from the initial-state quantities
//! `dH0`, `G`, `E` and `V = 2 dH0 + sqrt(2) G`.
//!
//! ```
//! use qsl_core::{compute_quantities, spontaneous_emission_model, t_qsl};
//!
//! let (model, psi0) = spontaneous_emission_model(1.0).unwrap();
//! let q = compute_quantities(&model, &psi0).unwrap();
//! let t = t_qsl(&q, std::f64::consts::FRAC_PI_4).unwrap();
//! assert!((t - (1.0 - std::f64::consts::LN_2)).abs() < 1e-15);
//! ```

/// Library version string echoed in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod dynamics;
pub mod error;
pub mod fisher;
pub mod linalg;
pub mod models;
pub mod qsl;
pub mod sampling;
pub mod verify;

pub use dynamics::{
    evolve, evolve_with, first_passage_time, propagate, theta_dot_exact, EvolveOptions,
    LindbladModel, Trajectory,
};
pub use error::{QslError, Result};
pub use fisher::{qfi_bound, qfi_short_time, verify_fisher_tradeoff, FisherReport};
pub use linalg::{pauli, ComplexMatrix, DensityMatrix, PureState, C64};
pub use models::{
    bloch_state, dephasing_model, exact_emission_time, product_model_dense,
    product_quantities_analytic, scaling_exponent, spontaneous_emission_model,
    DephasingQubitParams, LocalDissipation, ProductModelParams,
};
pub use qsl::{
    bures_angle, compute_quantities, evaluate_bound, evaluate_bounds, f_ratio, qsl_lower_bound,
    t_qsl, t_qsl_strong_decoherence, theta_dot_bound, BoundReport, QslQuantities,
};
pub use verify::{run_verification, VerifyConfig, VerifyReport};
