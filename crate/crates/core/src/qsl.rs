// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Speed-limit quantities and bounds evaluated at the initial state.
//!
//! For a pure initial state `rho0 = |psi0><psi0|` the Bures angle obeys
//!
//! ```text
//! dTheta/dt <= (V sin(Theta) + E) / sin(2 Theta),   V = 2 dH0 + sqrt(2) G
//! ```
//!
//! where `dH0` is the energy spread, `G = ||sum_k D^dagger[L_k] rho0||_F` and
//! `E = sum_k Var(L_k)`. Integrating with `u = sin(Theta)` gives the time bound
//!
//! ```text
//! T >= T_qsl = (2/V) (sin(Theta_T) - (E/V) ln(1 + (V/E) sin(Theta_T)))
//! ```
//!
//! which is evaluated here in the cancellation-free form
//! `T_qsl = 2 sin^2(Theta_T) phi(x) / E` with `x = V sin(Theta_T) / E` and
//! `phi(x) = (x - ln(1 + x)) / x^2`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_with, first_passage_time, EvolveOptions, LindbladModel};
use crate::error::{QslError, Result};
use crate::linalg::{frobenius_norm, trace_product, ComplexMatrix, DensityMatrix, PureState};

/// Slack on the `T >= T_qsl` comparison in [`BoundReport::satisfied`].
pub const BOUND_SLACK: f64 = 1e-9;

/// Scalars that fix the speed limit of a given generator and initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslQuantities {
    /// Energy standard deviation of the initial state.
    pub delta_h0: f64,
    /// Frobenius norm of the summed adjoint dissipator acting on `rho0`.
    pub g_term: f64,
    /// Summed variances of the Lindblad operators.
    pub e_term: f64,
    /// `2 delta_h0 + sqrt(2) g_term`.
    pub v_coeff: f64,
    /// `v_coeff / e_term`, defined only when `e_term > 0`.
    pub ratio_r: Option<f64>,
}

impl QslQuantities {
    pub fn from_terms(delta_h0: f64, g_term: f64, e_term: f64) -> Result<Self> {
        for (name, v) in [("delta_h0", delta_h0), ("g_term", g_term), ("e_term", e_term)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(QslError::InvalidArgument(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        let v_coeff = 2.0 * delta_h0 + SQRT_2 * g_term;
        Ok(Self {
            delta_h0,
            g_term,
            e_term,
            v_coeff,
            ratio_r: (e_term > 0.0).then(|| v_coeff / e_term),
        })
    }

    /// Synthetic bundle with the given effective speed and fluctuation term.
    pub fn from_speed(v_coeff: f64, e_term: f64) -> Result<Self> {
        Self::from_terms(0.5 * v_coeff, 0.0, e_term)
    }
}

/// First passage against the speed limit for one target angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theta_target: f64,
    /// `None` when the trajectory never reaches the target.
    pub t_first_passage: Option<f64>,
    pub t_qsl: f64,
    pub t_lower: f64,
    pub satisfied: bool,
}

pub(crate) fn angle_from_fidelity(fidelity: f64) -> f64 {
    fidelity.clamp(0.0, 1.0).sqrt().acos()
}

/// `arccos(sqrt(Tr(rho0 rho_t)))` for a pure reference state.
pub fn bures_angle(rho0: &DensityMatrix, rho_t: &DensityMatrix) -> Result<f64> {
    const PURITY_TOL: f64 = 1e-9;
    const OVERLAP_TOL: f64 = 1e-10;
    let purity = rho0.purity();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(QslError::NotPure(purity));
    }
    let overlap = trace_product(rho0.matrix(), rho_t.matrix())?;
    if overlap.im.abs() > OVERLAP_TOL || !(-1e-12..=1.0 + 1e-12).contains(&overlap.re) {
        return Err(QslError::InvalidArgument(format!(
            "overlap {overlap} is not a fidelity"
        )));
    }
    Ok(angle_from_fidelity(overlap.re))
}

/// Evaluates `dH0`, `G`, `E`, `V` and `r` from their definitions.
pub fn compute_quantities(model: &LindbladModel, psi0: &PureState) -> Result<QslQuantities> {
    if model.dim() != psi0.dim() {
        return Err(QslError::DimensionMismatch {
            left: model.dim(),
            right: psi0.dim(),
        });
    }
    let variance = |op: &ComplexMatrix| -> Result<f64> {
        let v = op.apply(psi0.amplitudes())?;
        let second: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let first = psi0.inner(&v).norm_sqr();
        Ok((second - first).max(0.0))
    };
    let delta_h0 = variance(model.hamiltonian())?.sqrt();
    let rho0 = psi0.projector();
    let mut adjoint_sum = ComplexMatrix::zeros(model.dim());
    let mut e_term = 0.0;
    for l in model.lindblad_ops() {
        adjoint_sum = &adjoint_sum + &crate::dynamics::adjoint_dissipator(l, &rho0)?;
        e_term += variance(l)?;
    }
    QslQuantities::from_terms(delta_h0, frobenius_norm(&adjoint_sum), e_term)
}

fn check_open_angle(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(QslError::SingularAngle(theta));
    }
    Ok(())
}

fn check_target(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(QslError::InvalidArgument(format!(
            "target angle must lie in (0, pi/2], got {theta}"
        )));
    }
    Ok(())
}

/// Upper bound on `dTheta/dt` at angle `theta`.
pub fn theta_dot_bound(q: &QslQuantities, theta: f64) -> Result<f64> {
    check_open_angle(theta)?;
    let s = theta.sin();
    Ok((2.0 * q.delta_h0 * s + SQRT_2 * q.g_term * s + q.e_term) / (2.0 * theta).sin())
}

/// `(x - ln(1 + x)) / x^2`, accurate for all `x >= 0`.
pub(crate) fn phi(x: f64) -> f64 {
    if x < 0.1 {
        // 1/2 - x/3 + x^2/4 - ...
        let mut acc = 0.0;
        let mut pow = 1.0;
        for k in 2..20 {
            let term = pow / k as f64;
            acc += if k % 2 == 0 { term } else { -term };
            pow *= x;
        }
        acc
    } else {
        (x - x.ln_1p()) / (x * x)
    }
}

/// The speed-limit time to reach `theta_target`.
pub fn t_qsl(q: &QslQuantities, theta_target: f64) -> Result<f64> {
    check_target(theta_target)?;
    let s = theta_target.sin();
    let (v, e) = (q.v_coeff, q.e_term);
    match (v > 0.0, e > 0.0) {
        (false, false) => Err(QslError::FrozenDynamics),
        (true, false) => Ok(2.0 * s / v),
        (false, true) => Ok(s * s / e),
        (true, true) => Ok(2.0 * s * s * phi(v * s / e) / e),
    }
}

/// Strong-decoherence form `sin^2(Theta_T) / E`.
pub fn t_qsl_strong_decoherence(q: &QslQuantities, theta_target: f64) -> Result<f64> {
    if !(q.e_term > 0.0) {
        return Err(QslError::InvalidArgument(
            "strong-decoherence form needs a positive fluctuation term".into(),
        ));
    }
    Ok(theta_target.sin().powi(2) / q.e_term)
}

/// `2 (sin(Theta_T) - ln(1 + r sin(Theta_T)) / r)`, so that `T_qsl = f / V` when `r = V/E`.
pub fn f_ratio(r: f64, theta_target: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(QslError::InvalidArgument(format!("ratio must be positive, got {r}")));
    }
    let s = theta_target.sin();
    Ok(2.0 * r * s * s * phi(r * s))
}

/// `sin^2(Theta_T) / (E + V sin(Theta_T))`, which never exceeds [`t_qsl`].
pub fn qsl_lower_bound(q: &QslQuantities, theta_target: f64) -> Result<f64> {
    check_target(theta_target)?;
    let s = theta_target.sin();
    let denom = q.e_term + q.v_coeff * s;
    if !(denom > 0.0) {
        return Err(QslError::FrozenDynamics);
    }
    Ok(s * s / denom)
}

/// Integrates the dynamics and compares first passage with the bound for each target.
pub fn evaluate_bounds(
    model: &LindbladModel,
    psi0: &PureState,
    targets: &[f64],
    horizon: f64,
    dt: f64,
) -> Result<Vec<BoundReport>> {
    let q = compute_quantities(model, psi0)?;
    let max_target = targets.iter().copied().fold(0.0, f64::max);
    let opts = EvolveOptions::new(horizon, dt).stop_at(max_target);
    let traj = evolve_with(model, psi0, &opts)?;
    targets
        .iter()
        .map(|&theta| {
            let t_qsl = t_qsl(&q, theta)?;
            let t_lower = qsl_lower_bound(&q, theta)?;
            let t_first_passage = match first_passage_time(&traj, theta) {
                Ok(t) => Some(t),
                Err(QslError::Unreachable { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(BoundReport {
                theta_target: theta,
                t_first_passage,
                t_qsl,
                t_lower,
                satisfied: t_first_passage.map_or(true, |t| t >= t_qsl - BOUND_SLACK),
            })
        })
        .collect()
}

pub fn evaluate_bound(
    model: &LindbladModel,
    psi0: &PureState,
    theta_target: f64,
    horizon: f64,
    dt: f64,
) -> Result<BoundReport> {
    Ok(evaluate_bounds(model, psi0, &[theta_target], horizon, dt)?[0])
}
