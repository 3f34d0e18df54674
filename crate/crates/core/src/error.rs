// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the kernel, the integrator and the bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("initial state is not pure (purity {0})")]
    NotPure(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(
        "dimension {dim} exceeds the dense cap {cap}; use the analytic product-state path instead"
    )]
    ResourceLimit { dim: usize, cap: usize },

    #[error("frozen dynamics: effective speed and fluctuation terms both vanish, no target angle is reachable")]
    FrozenDynamics,

    #[error("singular angle {0}: the rate formula divides by sin(2 theta)")]
    SingularAngle(f64),

    #[error(
        "integration quality failure at t = {time}: trace drift {trace_drift:e}, min eigenvalue {min_eig:e}; reduce dt"
    )]
    IntegrationQuality {
        time: f64,
        trace_drift: f64,
        min_eig: f64,
    },

    #[error("target angle {target} unreachable within horizon {horizon}")]
    Unreachable { target: f64, horizon: f64 },

    #[error("target angle {0} diverges: the exact decay time is infinite at or beyond pi/2")]
    Divergent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, QslError>;
