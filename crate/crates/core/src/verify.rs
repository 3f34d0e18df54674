// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Randomized falsification suites for the speed limit and its corollaries.
//!
//! Each property has the form `lhs <= rhs`; its margin is `rhs - lhs`
//! (relative to `rhs` where noted) and a case counts as a violation when the
//! margin drops below `-tolerance`. Violations carry the per-model seed and
//! the full generator so they can be replayed from the report alone.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_with, first_passage_time, theta_dot_exact, EvolveOptions, LindbladModel};
use crate::error::{QslError, Result};
use crate::fisher::{log_inequality_margin, verify_fisher_tradeoff_with};
use crate::linalg::{ComplexMatrix, PureState};
use crate::qsl::{compute_quantities, qsl_lower_bound, t_qsl, theta_dot_bound, QslQuantities};
use crate::sampling::{derive_seed, random_model, RandomModelSpec};

const FISHER_STREAM: u64 = 0xF15E_0000_0000_0001;
const SCALAR_STREAM: u64 = 0x5CA1_0000_0000_0002;

/// Inner edge of the angle window used for rate comparisons.
pub const DIFFERENTIAL_EDGE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub models: usize,
    pub spec: RandomModelSpec,
    pub theta_targets: Vec<f64>,
    pub tolerance: f64,
    pub dt: f64,
    pub horizon: f64,
    pub differential_points: usize,
    pub fisher_models: usize,
    pub fisher_spec: RandomModelSpec,
    pub fisher_t_grid: Vec<f64>,
    pub fisher_dt: f64,
    pub fisher_tolerance: f64,
    pub scalar_samples: usize,
    pub scalar_tolerance: f64,
    pub max_reported_violations: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            models: 300,
            spec: RandomModelSpec::default(),
            theta_targets: vec![0.2, 0.5, 0.8, 1.2],
            tolerance: 1e-7,
            dt: 2e-3,
            horizon: 20.0,
            differential_points: 50,
            fisher_models: 100,
            fisher_spec: RandomModelSpec {
                dim_max: 4,
                ..RandomModelSpec::default()
            },
            fisher_t_grid: (0..=8).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64)).collect(),
            fisher_dt: 1e-3,
            fisher_tolerance: 1e-6,
            scalar_samples: 10_000,
            scalar_tolerance: 1e-12,
            max_reported_violations: 20,
        }
    }
}

/// Generator dump in `[re, im]` pairs, replayable as an inline preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub hamiltonian: Vec<Vec<[f64; 2]>>,
    pub lindblad_ops: Vec<Vec<Vec<[f64; 2]>>>,
    pub psi0: Vec<[f64; 2]>,
}

impl ModelDump {
    pub fn new(model: &LindbladModel, psi0: &PureState) -> Self {
        let mat = |m: &ComplexMatrix| {
            m.as_slice()
                .chunks_exact(m.dim())
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect()
        };
        Self {
            hamiltonian: mat(model.hamiltonian()),
            lindblad_ops: model.lindblad_ops().iter().map(mat).collect(),
            psi0: psi0.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// One evaluated case of a property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub model_index: Option<u64>,
    pub model_seed: Option<u64>,
    pub theta: Option<f64>,
    pub time: Option<f64>,
    pub x: Option<f64>,
    pub v_coeff: Option<f64>,
    pub e_term: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelDump>,
}

impl Case {
    fn new(lhs: f64, rhs: f64, margin: f64) -> Self {
        Self {
            model_index: None,
            model_seed: None,
            theta: None,
            time: None,
            x: None,
            v_coeff: None,
            e_term: None,
            lhs,
            rhs,
            margin,
            model: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginKind {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub statement: String,
    pub margin_kind: MarginKind,
    pub tolerance: f64,
    pub checked: usize,
    pub passed: usize,
    pub violations: usize,
    /// Cases that could not be evaluated (for example unreachable targets).
    pub skipped: usize,
    pub worst_margin: Option<f64>,
    pub worst_case: Option<Case>,
    pub failures: Vec<Case>,
}

impl PropertyReport {
    fn new(name: &str, statement: &str, margin_kind: MarginKind, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            margin_kind,
            tolerance,
            checked: 0,
            passed: 0,
            violations: 0,
            skipped: 0,
            worst_margin: None,
            worst_case: None,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, case: Case, max_reported: usize) {
        self.checked += 1;
        let violated = case.margin < -self.tolerance;
        if violated {
            self.violations += 1;
        } else {
            self.passed += 1;
        }
        if self.worst_margin.map_or(true, |w| case.margin < w) {
            self.worst_margin = Some(case.margin);
            self.worst_case = Some(case.clone());
        }
        if violated && self.failures.len() < max_reported {
            self.failures.push(case);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub config: VerifyConfig,
    pub properties: Vec<PropertyReport>,
    pub total_violations: usize,
}

impl VerifyReport {
    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }
}

struct ModelOutcome {
    bound: Vec<Case>,
    bound_skipped: usize,
    differential: Vec<Case>,
}

fn with_model(mut case: Case, index: u64, seed: u64) -> Case {
    case.model_index = Some(index);
    case.model_seed = Some(seed);
    case
}

fn check_dynamics_model(cfg: &VerifyConfig, index: u64) -> Result<ModelOutcome> {
    let seed = derive_seed(cfg.seed, index);
    let drawn = random_model(seed, &cfg.spec);
    let q = compute_quantities(&drawn.model, &drawn.psi0)?;
    let max_target = cfg.theta_targets.iter().copied().fold(0.0, f64::max);
    let opts = EvolveOptions::new(cfg.horizon, cfg.dt)
        .stop_at(max_target.max(FRAC_PI_2 - DIFFERENTIAL_EDGE))
        .eig_every(10);
    let traj = evolve_with(&drawn.model, &drawn.psi0, &opts)?;

    let dump = || Some(ModelDump::new(&drawn.model, &drawn.psi0));
    let mut out = ModelOutcome {
        bound: Vec::new(),
        bound_skipped: 0,
        differential: Vec::new(),
    };
    for &theta in &cfg.theta_targets {
        let bound = match t_qsl(&q, theta) {
            Ok(t) => t,
            Err(QslError::FrozenDynamics) => {
                out.bound_skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match first_passage_time(&traj, theta) {
            Ok(t) => {
                let mut case = with_model(Case::new(bound, t, t - bound), index, seed);
                case.theta = Some(theta);
                case.time = Some(t);
                case.v_coeff = Some(q.v_coeff);
                case.e_term = Some(q.e_term);
                if case.margin < -cfg.tolerance {
                    case.model = dump();
                }
                out.bound.push(case);
            }
            Err(QslError::Unreachable { .. }) => out.bound_skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let window: Vec<usize> = traj
        .bures_angles
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > DIFFERENTIAL_EDGE && a < FRAC_PI_2 - DIFFERENTIAL_EDGE)
        .map(|(k, _)| k)
        .collect();
    for k in spread(&window, cfg.differential_points) {
        let theta = traj.bures_angles[k];
        let exact = theta_dot_exact(&drawn.model, traj.rho0(), &traj.states[k], theta)?;
        let bound = theta_dot_bound(&q, theta)?;
        let mut case = with_model(Case::new(exact, bound, bound - exact), index, seed);
        case.theta = Some(theta);
        case.time = Some(traj.times[k]);
        if case.margin < -cfg.tolerance {
            case.model = dump();
        }
        out.differential.push(case);
    }
    Ok(out)
}

/// Up to `count` evenly spread entries of `items`.
fn spread(items: &[usize], count: usize) -> Vec<usize> {
    if items.len() <= count {
        return items.to_vec();
    }
    if count == 1 {
        return vec![items[0]];
    }
    (0..count)
        .map(|i| items[i * (items.len() - 1) / (count - 1)])
        .collect()
}

fn check_fisher_model(cfg: &VerifyConfig, index: u64) -> Result<Vec<Case>> {
    let seed = derive_seed(cfg.seed ^ FISHER_STREAM, index);
    let drawn = random_model(seed, &cfg.fisher_spec);
    let reports = verify_fisher_tradeoff_with(
        &drawn.model,
        &drawn.psi0,
        &cfg.fisher_t_grid,
        cfg.fisher_dt,
        cfg.fisher_tolerance,
    )?;
    Ok(reports
        .into_iter()
        .map(|r| {
            let mut case = with_model(
                Case::new(r.qfi_estimate, r.qfi_bound, r.qfi_bound - r.qfi_estimate),
                index,
                seed,
            );
            case.time = Some(r.horizon_t);
            if case.margin < -cfg.fisher_tolerance {
                case.model = Some(ModelDump::new(&drawn.model, &drawn.psi0));
            }
            case
        })
        .collect())
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Runs every suite. Parallel sections use the ambient rayon pool; results are
/// merged in index order, so the report does not depend on the worker count.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.theta_targets.iter().any(|&t| !(t > 0.0 && t < FRAC_PI_2)) {
        return Err(QslError::InvalidArgument("target angles must lie in (0, pi/2)".into()));
    }
    let max_rep = cfg.max_reported_violations;

    let outcomes = (0..cfg.models as u64)
        .into_par_iter()
        .map(|i| check_dynamics_model(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let mut bound = PropertyReport::new(
        "bound_dominance",
        "t_qsl <= t_first_passage",
        MarginKind::Absolute,
        cfg.tolerance,
    );
    let mut differential = PropertyReport::new(
        "differential_dominance",
        "theta_dot_exact <= theta_dot_bound",
        MarginKind::Absolute,
        cfg.tolerance,
    );
    for o in outcomes {
        bound.skipped += o.bound_skipped;
        o.bound.into_iter().for_each(|c| bound.record(c, max_rep));
        o.differential.into_iter().for_each(|c| differential.record(c, max_rep));
    }

    let fisher_cases = (0..cfg.fisher_models as u64)
        .into_par_iter()
        .map(|i| check_fisher_model(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let mut fisher = PropertyReport::new(
        "fisher_tradeoff",
        "4(1-F)/t^2 <= (V + sqrt(V^2 + 4E/t))^2",
        MarginKind::Absolute,
        cfg.fisher_tolerance,
    );
    fisher_cases
        .into_iter()
        .flatten()
        .for_each(|c| fisher.record(c, max_rep));

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed ^ SCALAR_STREAM, 0));
    let mut log_ineq = PropertyReport::new(
        "log_inequality",
        "ln(1+x) <= x(x+2)/(2(1+x))",
        MarginKind::Absolute,
        cfg.scalar_tolerance,
    );
    let mut ordering = PropertyReport::new(
        "lower_bound_ordering",
        "sin^2/(E + V sin) <= t_qsl",
        MarginKind::Relative,
        cfg.scalar_tolerance,
    );
    for _ in 0..cfg.scalar_samples {
        let x = log_uniform(&mut rng, 1e-6, 1e6);
        let margin = log_inequality_margin(x)?;
        let mut case = Case::new(x.ln_1p(), x * (x + 2.0) / (2.0 * (1.0 + x)), margin);
        case.x = Some(x);
        log_ineq.record(case, max_rep);

        let v = log_uniform(&mut rng, 1e-3, 1e3);
        let e = log_uniform(&mut rng, 1e-3, 1e3);
        let theta = FRAC_PI_2 * (1.0 - rng.random::<f64>());
        let q = QslQuantities::from_speed(v, e)?;
        let upper = t_qsl(&q, theta)?;
        let lower = qsl_lower_bound(&q, theta)?;
        let mut case = Case::new(lower, upper, (upper - lower) / upper);
        case.theta = Some(theta);
        case.v_coeff = Some(v);
        case.e_term = Some(e);
        ordering.record(case, max_rep);
    }

    let properties = vec![bound, differential, fisher, log_ineq, ordering];
    let total_violations = properties.iter().map(|p| p.violations).sum();
    Ok(VerifyReport {
        seed: cfg.seed,
        config: cfg.clone(),
        properties,
        total_violations,
    })
}
