// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Short-time quantum Fisher information and its speed-limit bound.

use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate, LindbladModel};
use crate::error::{QslError, Result};
use crate::linalg::{trace_product, PureState};
use crate::qsl::{compute_quantities, QslQuantities};

/// Default slack on `estimate <= bound`.
pub const FISHER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub horizon_t: f64,
    pub fidelity_at_t: f64,
    pub qfi_estimate: f64,
    pub qfi_bound: f64,
    pub satisfied: bool,
    /// Whether `horizon_t` lies inside [`short_time_window`].
    pub in_window: bool,
}

/// `4 (1 - F) / t^2`.
pub fn qfi_short_time(fidelity: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(QslError::InvalidArgument(format!("t must be positive, got {t}")));
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(QslError::InvalidArgument(format!(
            "fidelity must lie in [0, 1], got {fidelity}"
        )));
    }
    Ok(4.0 * (1.0 - fidelity) / (t * t))
}

/// `(V + sqrt(V^2 + 4 E / t))^2`.
pub fn qfi_bound(q: &QslQuantities, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(QslError::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let v = q.v_coeff;
    Ok((v + (v * v + 4.0 * q.e_term / t).sqrt()).powi(2))
}

/// `x (x + 2) / (2 (1 + x)) - ln(1 + x)`, positive for every `x > 0`.
pub fn log_inequality_margin(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(QslError::InvalidArgument(format!("x must be positive, got {x}")));
    }
    if x < 0.05 {
        // sum_{k>=3} (-1)^(k+1) (1/2 - 1/k) x^k
        let mut acc = 0.0;
        let mut pow = x * x * x;
        for k in 3..24 {
            let term = (0.5 - 1.0 / k as f64) * pow;
            acc += if k % 2 == 1 { term } else { -term };
            pow *= x;
        }
        Ok(acc)
    } else {
        Ok(x * (x + 2.0) / (2.0 * (1.0 + x)) - x.ln_1p())
    }
}

/// Largest time treated as "short": `0.1 / max(V, E, dH0, 1)`.
pub fn short_time_window(q: &QslQuantities) -> f64 {
    0.1 / q.v_coeff.max(q.e_term).max(q.delta_h0).max(1.0)
}

/// Integrates to each grid time and compares the fidelity-based QFI estimate with the bound.
///
/// Grid points outside [`short_time_window`] are still evaluated; the report
/// flags them through `in_window`.
pub fn verify_fisher_tradeoff(
    model: &LindbladModel,
    psi0: &PureState,
    t_grid: &[f64],
    dt: f64,
) -> Result<Vec<FisherReport>> {
    verify_fisher_tradeoff_with(model, psi0, t_grid, dt, FISHER_TOLERANCE)
}

pub fn verify_fisher_tradeoff_with(
    model: &LindbladModel,
    psi0: &PureState,
    t_grid: &[f64],
    dt: f64,
    tolerance: f64,
) -> Result<Vec<FisherReport>> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid.first().is_some_and(|&t| t <= 0.0) {
        return Err(QslError::InvalidArgument(
            "t grid must be positive and strictly increasing".into(),
        ));
    }
    let q = compute_quantities(model, psi0)?;
    let window = short_time_window(&q);
    let rho0 = psi0.projector();
    let mut rho = rho0.clone();
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        // Resolve each gap with at least 16 steps so the smallest times stay accurate.
        let gap = t - t_prev;
        rho = propagate(model, &rho, gap, dt.min(gap / 16.0))?;
        t_prev = t;
        let fidelity = trace_product(&rho0, &rho)?.re.clamp(0.0, 1.0);
        let estimate = qfi_short_time(fidelity, t)?;
        let bound = qfi_bound(&q, t)?;
        out.push(FisherReport {
            horizon_t: t,
            fidelity_at_t: fidelity,
            qfi_estimate: estimate,
            qfi_bound: bound,
            satisfied: estimate <= bound + tolerance,
            in_window: t <= window,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;
    use crate::linalg::ComplexMatrix;
    use approx::assert_abs_diff_eq;

    fn rabi() -> (LindbladModel, PureState) {
        (
            LindbladModel::closed(sigma_x().scale_real(0.5)).unwrap(),
            PureState::basis(2, 0),
        )
    }

    #[test]
    fn qfi_short_time_examples() {
        assert_eq!(qfi_short_time(1.0, 0.3).unwrap(), 0.0);
        // Rabi with omega = 1: F(t) = cos^2(t/2).
        let t = 1e-3;
        let est = qfi_short_time((t / 2.0f64).cos().powi(2), t).unwrap();
        assert_abs_diff_eq!(est, 1.0, epsilon = 1e-6);
        // Emission, gamma = 1: F = exp(-t), estimate ~ 4/t.
        let est = qfi_short_time((-t).exp(), t).unwrap();
        assert!((est * t / 4.0 - 1.0).abs() < 1e-3);
        assert!(qfi_short_time(0.5, 0.0).is_err());
        assert!(qfi_short_time(1.5, 1.0).is_err());
    }

    #[test]
    fn qfi_bound_examples() {
        let q = QslQuantities::from_speed(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(qfi_bound(&q, 1.0).unwrap(), 4.0, epsilon = 1e-15);
        let q = QslQuantities::from_terms(0.0, 1.0, 1.0).unwrap();
        let want = (2f64.sqrt() + 6f64.sqrt()).powi(2);
        assert_abs_diff_eq!(qfi_bound(&q, 1.0).unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(want, 14.928_203, epsilon = 1e-6);
        let closed = QslQuantities::from_terms(0.35, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(qfi_bound(&closed, 0.01).unwrap(), 16.0 * 0.35 * 0.35, epsilon = 1e-14);
        assert!(qfi_bound(&q, -1.0).is_err());
    }

    #[test]
    fn log_margin_examples() {
        assert_abs_diff_eq!(log_inequality_margin(1.0).unwrap(), 0.75 - 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(log_inequality_margin(10.0).unwrap(), 120.0 / 22.0 - 11f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_inequality_margin(10.0).unwrap(), 3.056_650_181_747, epsilon = 1e-12);
        let x = 1e-4;
        assert_abs_diff_eq!(log_inequality_margin(x).unwrap() / (x * x * x / 6.0), 1.0, epsilon = 1e-3);
        assert!(log_inequality_margin(0.0).is_err());
        // Both branches agree at the switch.
        let below = log_inequality_margin(0.05 - 1e-12).unwrap();
        let above = log_inequality_margin(0.05).unwrap();
        assert!((below - above).abs() / above < 1e-9);
    }

    #[test]
    fn rabi_tradeoff() {
        let (model, psi0) = rabi();
        let reports = verify_fisher_tradeoff(&model, &psi0, &[1e-3, 1e-2], 1e-4).unwrap();
        for r in &reports {
            assert!(r.satisfied);
            assert!((r.qfi_estimate - 1.0).abs() < 1e-4, "{}", r.qfi_estimate);
            assert_abs_diff_eq!(r.qfi_bound, 4.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn emission_tradeoff_ratio() {
        let model = LindbladModel::new(ComplexMatrix::zeros(2), vec![sigma_minus()]).unwrap();
        let r = verify_fisher_tradeoff(&model, &PureState::basis(2, 0), &[1e-2], 1e-4).unwrap()[0];
        assert!(r.satisfied);
        // estimate ~ 4 gamma / t, bound ~ 4 E / t (1 + o(1)) with E = gamma.
        let want_estimate = 4.0 * (1.0 - (-1e-2f64).exp()) / 1e-4;
        assert_abs_diff_eq!(r.qfi_estimate, want_estimate, epsilon = 1e-6);
        let ratio = r.qfi_estimate / r.qfi_bound;
        assert!(ratio > 0.5 && ratio < 1.0, "{ratio}");
    }

    #[test]
    fn zero_generator_is_trivially_satisfied() {
        let model = LindbladModel::closed(ComplexMatrix::zeros(2)).unwrap();
        let reports = verify_fisher_tradeoff(&model, &PureState::basis(2, 1), &[1e-3, 0.1], 1e-3).unwrap();
        for r in reports {
            assert_eq!(r.qfi_estimate, 0.0);
            assert!(r.satisfied);
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let (model, psi0) = rabi();
        assert!(verify_fisher_tradeoff(&model, &psi0, &[0.1, 0.01], 1e-3).is_err());
        assert!(verify_fisher_tradeoff(&model, &psi0, &[0.0, 0.01], 1e-3).is_err());
    }
}
