// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad generator, fixed-step RK4 integrator and first-passage search.

use std::f64::consts::FRAC_PI_2;

use crate::error::{QslError, Result};
use crate::linalg::{
    commutator, eigenvalues_hermitian, gemm_into, trace_product, trace_product_unchecked,
    ComplexMatrix, DensityMatrix, PureState, C64, HERM_TOL,
};
use crate::qsl::angle_from_fidelity;

/// Largest tolerated `|Tr rho - 1|` during a run.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Most negative tolerated eigenvalue during a run.
pub const MIN_EIG_LIMIT: f64 = -1e-5;
/// Trace drift above which a state is renormalized (and the event counted).
pub const RENORM_THRESHOLD: f64 = 1e-12;
/// Upper bound on the absolute time resolution of the first-passage bisection
/// (crossings are also resolved to 1e-12 relative).
pub const FIRST_PASSAGE_RESOLUTION: f64 = 1e-8;
/// Distance from 0 or pi/2 at which the angle-rate formula is refused.
pub const SINGULAR_ANGLE_EPS: f64 = 1e-6;
/// Fidelity below which a state counts as orthogonal to the initial one.
pub const ORTHOGONAL_FIDELITY: f64 = 1e-12;

/// Hamiltonian plus Lindblad operators; `hbar = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    lindblad_ops: Vec<ComplexMatrix>,
}

impl LindbladModel {
    pub fn new(hamiltonian: ComplexMatrix, lindblad_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dev = hamiltonian.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(QslError::NotHermitian(dev));
        }
        let dim = hamiltonian.dim();
        if let Some(l) = lindblad_ops.iter().find(|l| l.dim() != dim) {
            return Err(QslError::DimensionMismatch {
                left: dim,
                right: l.dim(),
            });
        }
        Ok(Self {
            hamiltonian,
            lindblad_ops,
        })
    }

    pub fn closed(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    /// Rescales time: `H -> lambda H`, `L_k -> sqrt(lambda) L_k`.
    pub fn time_scaled(&self, lambda: f64) -> Self {
        Self {
            hamiltonian: self.hamiltonian.scale_real(lambda),
            lindblad_ops: self
                .lindblad_ops
                .iter()
                .map(|l| l.scale_real(lambda.sqrt()))
                .collect(),
        }
    }
}

/// `L rho L^dagger - {L^dagger L, rho} / 2`.
pub fn dissipator(l: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if l.dim() != rho.dim() {
        return Err(QslError::DimensionMismatch {
            left: l.dim(),
            right: rho.dim(),
        });
    }
    let ld = l.adjoint();
    let ldl = &ld * l;
    let jump = &(l * rho) * &ld;
    let anti = &(&ldl * rho) + &(rho * &ldl);
    Ok(&jump - &anti.scale_real(0.5))
}

/// Heisenberg-picture dual: `L^dagger a L - {L^dagger L, a} / 2`.
pub fn adjoint_dissipator(l: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if l.dim() != a.dim() {
        return Err(QslError::DimensionMismatch {
            left: l.dim(),
            right: a.dim(),
        });
    }
    let ld = l.adjoint();
    let ldl = &ld * l;
    let jump = &(&ld * a) * l;
    let anti = &(&ldl * a) + &(a * &ldl);
    Ok(&jump - &anti.scale_real(0.5))
}

/// `-i[H, rho] + sum_k D[L_k] rho`, assembled term by term.
pub fn lindblad_rhs(model: &LindbladModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = commutator(&model.hamiltonian, rho)?.scale(C64::new(0.0, -1.0));
    for l in &model.lindblad_ops {
        out = &out + &dissipator(l, rho)?;
    }
    Ok(out)
}

/// The generator rewritten with `H_eff = H - (i/2) sum L^dagger L`:
/// `rho' = -i H_eff rho + i rho H_eff^dagger + sum L rho L^dagger`.
struct Generator {
    h_eff: ComplexMatrix,
    h_eff_adj: ComplexMatrix,
    ops: Vec<(ComplexMatrix, ComplexMatrix)>,
}

struct Workspace {
    t1: ComplexMatrix,
    t2: ComplexMatrix,
    k: [ComplexMatrix; 4],
    stage: ComplexMatrix,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = || ComplexMatrix::zeros(dim);
        Self {
            t1: z(),
            t2: z(),
            k: [z(), z(), z(), z()],
            stage: z(),
        }
    }
}

impl Generator {
    fn new(model: &LindbladModel) -> Self {
        let dim = model.dim();
        let mut k_sum = ComplexMatrix::zeros(dim);
        let ops: Vec<_> = model
            .lindblad_ops
            .iter()
            .map(|l| {
                let ld = l.adjoint();
                k_sum = &k_sum + &(&ld * l);
                (l.clone(), ld)
            })
            .collect();
        let h_eff = &model.hamiltonian - &k_sum.scale(C64::new(0.0, 0.5));
        let h_eff_adj = h_eff.adjoint();
        Self {
            h_eff,
            h_eff_adj,
            ops,
        }
    }

    fn apply(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix, t1: &mut ComplexMatrix, t2: &mut ComplexMatrix) {
        let minus_i = C64::new(0.0, -1.0);
        gemm_into(&self.h_eff, rho, t1);
        gemm_into(rho, &self.h_eff_adj, t2);
        for ((o, a), b) in out
            .as_mut_slice()
            .iter_mut()
            .zip(t1.as_slice())
            .zip(t2.as_slice())
        {
            *o = minus_i * (a - b);
        }
        for (l, ld) in &self.ops {
            gemm_into(l, rho, t1);
            gemm_into(t1, ld, t2);
            for (o, j) in out.as_mut_slice().iter_mut().zip(t2.as_slice()) {
                *o += j;
            }
        }
    }

    /// One classical RK4 step of size `h`, in place.
    fn rk4_step(&self, rho: &mut ComplexMatrix, h: f64, ws: &mut Workspace) {
        let Workspace { t1, t2, k, stage } = ws;
        let [k1, k2, k3, k4] = k;
        self.apply(rho, k1, t1, t2);
        stage.as_mut_slice().copy_from_slice(rho.as_slice());
        stage.axpy(C64::new(0.5 * h, 0.0), k1);
        self.apply(stage, k2, t1, t2);
        stage.as_mut_slice().copy_from_slice(rho.as_slice());
        stage.axpy(C64::new(0.5 * h, 0.0), k2);
        self.apply(stage, k3, t1, t2);
        stage.as_mut_slice().copy_from_slice(rho.as_slice());
        stage.axpy(C64::new(h, 0.0), k3);
        self.apply(stage, k4, t1, t2);
        let w = h / 6.0;
        for ((((r, a), b), c), d) in rho
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice())
            .zip(k3.as_slice())
            .zip(k4.as_slice())
        {
            *r += w * (a + 2.0 * b + 2.0 * c + d);
        }
    }
}

/// Integration settings for [`evolve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Stop as soon as the Bures angle reaches this value.
    pub stop_angle: Option<f64>,
    /// Compute the minimum eigenvalue every `eig_every` steps (0 disables).
    pub eig_every: usize,
}

impl EvolveOptions {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            stop_angle: None,
            eig_every: 1,
        }
    }

    pub fn stop_at(mut self, angle: f64) -> Self {
        self.stop_angle = Some(angle);
        self
    }

    pub fn eig_every(mut self, every: usize) -> Self {
        self.eig_every = every;
        self
    }
}

/// One integration run sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub bures_angles: Vec<f64>,
    /// `Tr(rho_0 rho_t)` at each grid point, clamped to `[0, 1]`.
    pub fidelities: Vec<f64>,
    /// Max `|Tr rho_t - 1|` seen before any renormalization.
    pub trace_drift: f64,
    pub min_eig: f64,
    pub max_hermitian_deviation: f64,
    pub renormalizations: usize,
    /// Actual step size, `t_end / ceil(t_end / dt)`.
    pub step: f64,
    pub horizon: f64,
    model: LindbladModel,
    rho0: DensityMatrix,
}

impl Trajectory {
    pub fn model(&self) -> &LindbladModel {
        &self.model
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }

    /// Integrates from grid point `k` for an extra time `tau`.
    fn state_after(&self, generator: &Generator, k: usize, tau: f64, ws: &mut Workspace) -> ComplexMatrix {
        let mut rho = self.states[k].matrix().clone();
        if tau > 0.0 {
            generator.rk4_step(&mut rho, tau, ws);
        }
        rho
    }

    fn fidelity_of(&self, rho: &ComplexMatrix) -> f64 {
        trace_product_unchecked(self.rho0.matrix(), rho).re.clamp(0.0, 1.0)
    }
}

pub fn evolve(model: &LindbladModel, psi0: &PureState, t_end: f64, dt: f64) -> Result<Trajectory> {
    evolve_with(model, psi0, &EvolveOptions::new(t_end, dt))
}

/// Fixed-step RK4 from `rho_0 = |psi0><psi0|`.
pub fn evolve_with(model: &LindbladModel, psi0: &PureState, opts: &EvolveOptions) -> Result<Trajectory> {
    let EvolveOptions {
        t_end,
        dt,
        stop_angle,
        eig_every,
    } = *opts;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(QslError::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0 && dt <= t_end) {
        return Err(QslError::InvalidArgument(format!(
            "dt must lie in (0, t_end], got dt = {dt}, t_end = {t_end}"
        )));
    }
    if psi0.dim() != model.dim() {
        return Err(QslError::DimensionMismatch {
            left: model.dim(),
            right: psi0.dim(),
        });
    }
    let n_steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / n_steps as f64;
    let generator = Generator::new(model);
    let mut ws = Workspace::new(model.dim());
    let rho0 = psi0.density();

    let mut rho = rho0.matrix().clone();
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        states: Vec::with_capacity(n_steps + 1),
        bures_angles: Vec::with_capacity(n_steps + 1),
        fidelities: Vec::with_capacity(n_steps + 1),
        trace_drift: 0.0,
        min_eig: f64::INFINITY,
        max_hermitian_deviation: 0.0,
        renormalizations: 0,
        step: h,
        horizon: t_end,
        model: model.clone(),
        rho0: rho0.clone(),
    };

    for step in 0..=n_steps {
        let t = step as f64 * h;
        if step > 0 {
            generator.rk4_step(&mut rho, h, &mut ws);
            let tr = rho.trace();
            let drift = (tr - 1.0).norm();
            traj.trace_drift = traj.trace_drift.max(drift);
            if drift > TRACE_DRIFT_LIMIT {
                return Err(QslError::IntegrationQuality {
                    time: t,
                    trace_drift: drift,
                    min_eig: traj.min_eig,
                });
            }
            if drift > RENORM_THRESHOLD {
                let inv = 1.0 / tr;
                for z in rho.as_mut_slice() {
                    *z *= inv;
                }
                traj.renormalizations += 1;
            }
        }
        traj.max_hermitian_deviation = traj.max_hermitian_deviation.max(rho.hermitian_deviation());
        if eig_every > 0 && (step % eig_every == 0 || step == n_steps) {
            let min = eigenvalues_hermitian(&rho)
                .map_err(|_| QslError::IntegrationQuality {
                    time: t,
                    trace_drift: traj.trace_drift,
                    min_eig: f64::NAN,
                })?[0];
            traj.min_eig = traj.min_eig.min(min);
            if min < MIN_EIG_LIMIT {
                return Err(QslError::IntegrationQuality {
                    time: t,
                    trace_drift: traj.trace_drift,
                    min_eig: min,
                });
            }
        }
        let fid = traj.fidelity_of(&rho);
        let theta = angle_from_fidelity(fid);
        traj.times.push(t);
        traj.states.push(DensityMatrix::from_trusted(rho.clone()));
        traj.bures_angles.push(theta);
        traj.fidelities.push(fid);
        if stop_angle.is_some_and(|a| theta >= a) {
            break;
        }
    }
    Ok(traj)
}

/// Propagates `rho` for `duration` using equal RK4 steps no longer than `max_dt`.
pub fn propagate(model: &LindbladModel, rho: &ComplexMatrix, duration: f64, max_dt: f64) -> Result<ComplexMatrix> {
    if model.dim() != rho.dim() {
        return Err(QslError::DimensionMismatch {
            left: model.dim(),
            right: rho.dim(),
        });
    }
    if !(duration >= 0.0 && max_dt > 0.0) {
        return Err(QslError::InvalidArgument(format!(
            "need duration >= 0 and max_dt > 0, got {duration}, {max_dt}"
        )));
    }
    let mut out = rho.clone();
    if duration == 0.0 {
        return Ok(out);
    }
    let n = (duration / max_dt - 1e-9).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    let generator = Generator::new(model);
    let mut ws = Workspace::new(model.dim());
    for _ in 0..n {
        generator.rk4_step(&mut out, h, &mut ws);
    }
    Ok(out)
}

/// Ratio of global errors at `dt` and `dt/2`, measured against a `dt/32` run.
///
/// A fourth-order method gives a ratio near 16.
pub fn convergence_ratio(model: &LindbladModel, psi0: &PureState, t_end: f64, dt: f64) -> Result<f64> {
    let rho0 = psi0.projector();
    let reference = propagate(model, &rho0, t_end, dt / 32.0)?;
    let coarse = propagate(model, &rho0, t_end, dt)?;
    let fine = propagate(model, &rho0, t_end, dt / 2.0)?;
    let err = |m: &ComplexMatrix| crate::linalg::frobenius_norm(&(m - &reference));
    Ok(err(&coarse) / err(&fine))
}

/// Earliest time at which the Bures angle reaches `theta_target`.
///
/// The grid is scanned for the first sample at or above the target, then the
/// crossing is bisected inside that step by re-integrating from the previous
/// grid point. A target of pi/2 (orthogonality) is located as the first
/// fidelity minimum that drops below [`ORTHOGONAL_FIDELITY`].
pub fn first_passage_time(traj: &Trajectory, theta_target: f64) -> Result<f64> {
    if traj.is_empty() {
        return Err(QslError::InvalidArgument("empty trajectory".into()));
    }
    if !(theta_target > 0.0 && theta_target <= FRAC_PI_2) {
        return Err(QslError::InvalidArgument(format!(
            "target angle must lie in (0, pi/2], got {theta_target}"
        )));
    }
    let generator = Generator::new(&traj.model);
    let mut ws = Workspace::new(traj.model.dim());
    if theta_target >= FRAC_PI_2 - 1e-9 {
        return orthogonal_passage(traj, &generator, &mut ws);
    }
    let Some(k) = traj.bures_angles.iter().position(|&a| a >= theta_target) else {
        return Err(QslError::Unreachable {
            target: theta_target,
            horizon: traj.horizon,
        });
    };
    if k == 0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, traj.times[k] - traj.times[k - 1]);
    // Relative resolution keeps early crossings (t << 1) as accurate as late ones.
    let resolution = FIRST_PASSAGE_RESOLUTION.min(1e-12 * traj.times[k]);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        let rho = traj.state_after(&generator, k - 1, mid, &mut ws);
        if angle_from_fidelity(traj.fidelity_of(&rho)) >= theta_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(traj.times[k - 1] + 0.5 * (lo + hi))
}

fn orthogonal_passage(traj: &Trajectory, generator: &Generator, ws: &mut Workspace) -> Result<f64> {
    const CANDIDATE_FIDELITY: f64 = 1e-2;
    let f = &traj.fidelities;
    let n = f.len();
    for k in 0..n {
        if f[k] <= ORTHOGONAL_FIDELITY {
            return Ok(traj.times[k]);
        }
        let is_min = k > 0 && k + 1 < n && f[k] <= f[k - 1] && f[k] <= f[k + 1];
        if !is_min || f[k] > CANDIDATE_FIDELITY {
            continue;
        }
        // Golden-section search for the fidelity minimum in [t_{k-1}, t_{k+1}].
        let span = traj.times[k + 1] - traj.times[k - 1];
        let fid_at = |tau: f64, ws: &mut Workspace| traj.fidelity_of(&traj.state_after(generator, k - 1, tau, ws));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (0.0, span);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (fid_at(c, ws), fid_at(d, ws));
        while b - a > FIRST_PASSAGE_RESOLUTION {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = fid_at(c, ws);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = fid_at(d, ws);
            }
        }
        let tau = 0.5 * (a + b);
        if fid_at(tau, ws) <= ORTHOGONAL_FIDELITY {
            return Ok(traj.times[k - 1] + tau);
        }
    }
    Err(QslError::Unreachable {
        target: FRAC_PI_2,
        horizon: traj.horizon,
    })
}

/// Exact angular speed `dTheta/dt` from the instantaneous state:
/// `[Tr(i[rho0, H] rho_t) - sum_k Tr(rho_t D^dagger[L_k] rho0)] / sin(2 theta)`.
pub fn theta_dot_exact(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    rho_t: &DensityMatrix,
    theta_t: f64,
) -> Result<f64> {
    if !(theta_t > SINGULAR_ANGLE_EPS && theta_t < FRAC_PI_2 - SINGULAR_ANGLE_EPS) {
        return Err(QslError::SingularAngle(theta_t));
    }
    let r0 = rho0.matrix();
    let rt = rho_t.matrix();
    let unitary = commutator(r0, model.hamiltonian())?.scale(C64::new(0.0, 1.0));
    let mut numerator = trace_product(&unitary, rt)?.re;
    for l in model.lindblad_ops() {
        numerator -= trace_product(rt, &adjoint_dissipator(l, r0)?)?.re;
    }
    Ok(numerator / (2.0 * theta_t).sin())
}
