// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Qubit presets and the N-qubit product model.
//!
//! Basis convention: `|0> = (1, 0)` is the excited state and `|1> = (0, 1)`
//! the ground state, so `sigma_- = |1><0|` drives decay.

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, LindbladModel};
use crate::error::{QslError, Result};
use crate::linalg::{frobenius_norm, kron, pauli, trace_product, ComplexMatrix, PureState, C64};
use crate::qsl::QslQuantities;

/// Effective decay constant of the excited population per unit `gamma` under
/// `L = sqrt(gamma) sigma_-`. The master equation gives `p(t) = exp(-gamma t)`;
/// [`calibrate_emission_rate`] recovers this value from the integrator.
pub const EMISSION_RATE_FACTOR: f64 = 1.0;

/// Largest `n` accepted by [`product_model_dense`].
pub const DENSE_PRODUCT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingQubitParams {
    pub omega: f64,
    pub gamma: f64,
    /// Bloch polar angle of the initial state.
    pub theta: f64,
}

/// Which sites carry a local `sqrt(gamma) sigma_x` channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalDissipation {
    #[default]
    EverySite,
    FirstSiteOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductModelParams {
    pub n: usize,
    pub omega: f64,
    pub gamma: f64,
    pub theta: f64,
    #[serde(default)]
    pub dissipation: LocalDissipation,
}

impl ProductModelParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(QslError::InvalidArgument("n must be positive".into()));
        }
        check_qubit_params(self.omega, self.gamma, self.theta)
    }

    fn dissipated_sites(&self) -> usize {
        match self.dissipation {
            LocalDissipation::EverySite => self.n,
            LocalDissipation::FirstSiteOnly => 1,
        }
    }
}

fn check_qubit_params(omega: f64, gamma: f64, theta: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(QslError::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(QslError::InvalidArgument(format!("gamma must be nonnegative, got {gamma}")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(QslError::InvalidArgument(format!("theta must lie in [0, pi], got {theta}")));
    }
    Ok(())
}

/// `cos(theta/2)|0> + sin(theta/2)|1>`.
pub fn bloch_state(theta: f64) -> PureState {
    PureState::normalized(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::new((theta / 2.0).sin(), 0.0),
    ])
    .expect("unit vector")
}

/// Rabi drive `(omega/2) sigma_x` with dephasing `sqrt(gamma) sigma_z`.
pub fn dephasing_model(p: &DephasingQubitParams) -> Result<(LindbladModel, PureState)> {
    check_qubit_params(p.omega, p.gamma, p.theta)?;
    let model = LindbladModel::new(
        pauli::sigma_x().scale_real(p.omega / 2.0),
        vec![pauli::sigma_z().scale_real(p.gamma.sqrt())],
    )?;
    Ok((model, bloch_state(p.theta)))
}

/// `H = 0`, `L = sqrt(gamma) sigma_-`, starting in the excited state.
pub fn spontaneous_emission_model(gamma: f64) -> Result<(LindbladModel, PureState)> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(QslError::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let model = LindbladModel::new(
        ComplexMatrix::zeros(2),
        vec![pauli::sigma_minus().scale_real(gamma.sqrt())],
    )?;
    Ok((model, PureState::basis(2, 0)))
}

/// Fits the excited-population decay constant per unit `gamma` from an
/// integrator run of the emission preset over `t in [0, 1]`.
pub fn calibrate_emission_rate(dt: f64) -> Result<f64> {
    let gamma = 1.0;
    let (model, psi0) = spontaneous_emission_model(gamma)?;
    let traj = evolve(&model, &psi0, 1.0, dt)?;
    let population = trace_product(&psi0.projector(), traj.final_state().matrix())?.re;
    Ok(-population.ln() / gamma)
}

/// `-ln(cos^2 Theta_T) / gamma_eff` with `gamma_eff = EMISSION_RATE_FACTOR * gamma`.
pub fn exact_emission_time(gamma: f64, theta_target: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(QslError::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if theta_target >= std::f64::consts::FRAC_PI_2 {
        return Err(QslError::Divergent(theta_target));
    }
    if !(theta_target > 0.0) {
        return Err(QslError::InvalidArgument(format!(
            "target angle must be positive, got {theta_target}"
        )));
    }
    Ok(-theta_target.cos().powi(2).ln() / (EMISSION_RATE_FACTOR * gamma))
}

fn embed(op: &ComplexMatrix, site: usize, n: usize) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(2);
    let mut out = if site == 0 { op.clone() } else { id.clone() };
    for k in 1..n {
        out = kron(&out, if k == site { op } else { &id })?;
    }
    Ok(out)
}

/// Dense `2^n`-dimensional product model: `H = sum (omega/2) sigma_z^(i)`,
/// local channels `sqrt(gamma) sigma_x^(i)`, product initial state.
pub fn product_model_dense(p: &ProductModelParams) -> Result<(LindbladModel, PureState)> {
    p.validate()?;
    if p.n > DENSE_PRODUCT_MAX_N {
        return Err(QslError::ResourceLimit {
            dim: 1usize.checked_shl(p.n as u32).unwrap_or(usize::MAX),
            cap: 1 << DENSE_PRODUCT_MAX_N,
        });
    }
    let hz = pauli::sigma_z().scale_real(p.omega / 2.0);
    let lx = pauli::sigma_x().scale_real(p.gamma.sqrt());
    let mut h = ComplexMatrix::zeros(1 << p.n);
    for site in 0..p.n {
        h = &h + &embed(&hz, site, p.n)?;
    }
    let ops = (0..p.dissipated_sites())
        .map(|site| embed(&lx, site, p.n))
        .collect::<Result<Vec<_>>>()?;
    let single = bloch_state(p.theta);
    let psi0 = (1..p.n).fold(single.clone(), |acc, _| acc.kron(&single));
    Ok((LindbladModel::new(h, ops)?, psi0))
}

/// O(n) evaluation of the product-model quantities from single-site reductions.
///
/// With `A = D^dagger[l] rho1` on one site, the summed adjoint dissipator is
/// `X = sum_i rho1 ⊗ .. ⊗ A_(i) ⊗ .. ⊗ rho1`. Because `Tr(rho1^2) = 1`,
/// `Tr(X_i X_j)` is `Tr(A^2)` for `i = j` and `Tr(rho1 A)^2` otherwise, so
/// `G^2 = m Tr(A^2) + m (m - 1) Tr(rho1 A)^2` for `m` dissipated sites.
pub fn product_quantities_analytic(p: &ProductModelParams) -> Result<QslQuantities> {
    p.validate()?;
    let psi = bloch_state(p.theta);
    let rho1 = psi.projector();
    let variance = |op: &ComplexMatrix| -> Result<f64> {
        let v = op.apply(psi.amplitudes())?;
        let second: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Ok((second - psi.inner(&v).norm_sqr()).max(0.0))
    };
    let hz = pauli::sigma_z().scale_real(p.omega / 2.0);
    let lx = pauli::sigma_x().scale_real(p.gamma.sqrt());
    let n = p.n as f64;
    let m = p.dissipated_sites() as f64;
    let delta_h0 = (n * variance(&hz)?).sqrt();
    let e_term = m * variance(&lx)?;
    let a = crate::dynamics::adjoint_dissipator(&lx, &rho1)?;
    let diag = frobenius_norm(&a).powi(2);
    let cross = trace_product(&rho1, &a)?.re;
    let g_sq = m * diag + m * (m - 1.0) * cross * cross;
    QslQuantities::from_terms(delta_h0, g_sq.max(0.0).sqrt(), e_term)
}

/// Least-squares slope of `ln t` against `ln n`.
pub fn scaling_exponent(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(QslError::InvalidArgument(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(n, t)| !(n > 0.0 && t > 0.0 && n.is_finite() && t.is_finite())) {
        return Err(QslError::InvalidArgument("samples must be positive and finite".into()));
    }
    let mut abscissae: Vec<f64> = samples.iter().map(|s| s.0).collect();
    abscissae.sort_by(f64::total_cmp);
    if abscissae.windows(2).any(|w| w[0] == w[1]) {
        return Err(QslError::InvalidArgument("abscissae must be distinct".into()));
    }
    let k = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(QslError::InvalidArgument("degenerate abscissae".into()));
    }
    Ok(sxy / sxx)
}
