// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment drivers behind each subcommand.

use std::f64::consts::FRAC_PI_2;

use qsl_core::fisher::{verify_fisher_tradeoff_with, FISHER_TOLERANCE};
use qsl_core::linalg::min_eigenvalue_hermitian;
use qsl_core::models::{calibrate_emission_rate, exact_emission_time, EMISSION_RATE_FACTOR};
use qsl_core::{
    compute_quantities, dephasing_model, evolve_with, first_passage_time, product_quantities_analytic,
    qsl_lower_bound, run_verification, scaling_exponent, spontaneous_emission_model, t_qsl,
    DephasingQubitParams, EvolveOptions, ProductModelParams, QslError, VerifyReport,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Format, Params, Preset, ScalingAxis};
use crate::error::{exit, CliError};
use crate::output::{to_json_bytes, Cell, Table};

/// Rows near `pi/2` in the emission comparison are capped this far below it.
pub const FIG1B_EDGE: f64 = 0.01;

/// Largest step used for the emission-rate calibration echoed in metadata.
const CALIBRATION_MAX_DT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Speed-limit quantities and times over an optional sweep.
    Qsl,
    /// Dephasing qubit: t_qsl against gamma for several drive strengths.
    Fig1a,
    /// Spontaneous emission: exact, first-passage and speed-limit times.
    Fig1b,
    /// Product-state N-qubit model: t_qsl against n (or gamma) and the fitted exponent.
    Scaling,
    /// Randomized property suites; exits with 3 on any violation.
    Verify,
    /// Short-time Fisher information estimate against its bound.
    Qfi,
    /// Raw trajectory dump.
    Evolve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Qsl => "qsl",
            Command::Fig1a => "fig1a",
            Command::Fig1b => "fig1b",
            Command::Scaling => "scaling",
            Command::Verify => "verify",
            Command::Qfi => "qfi",
            Command::Evolve => "evolve",
        }
    }
}

/// Effective emission rate per unit `gamma`: the value used and the integrator estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEff {
    pub factor: f64,
    pub calibrated: f64,
    pub calibration_dt: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub format: Format,
    pub seed: u64,
    pub dt: f64,
    pub gamma_eff: GammaEff,
    pub notes: Vec<String>,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: Vec<u8>,
    pub metadata: Metadata,
    pub exit_code: i32,
    pub warnings: Vec<String>,
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
}

struct Produced {
    body: Vec<u8>,
    notes: Vec<String>,
    warnings: Vec<String>,
    exit_code: i32,
}

impl Produced {
    fn table(table: Table, format: Format) -> Self {
        Self {
            body: table.render(format),
            notes: Vec::new(),
            warnings: Vec::new(),
            exit_code: exit::OK,
        }
    }
}

pub fn execute(command: Command, opts: &RunOptions) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| CliError::Config(format!("workers: {e}")))?;
    let produced = pool.install(|| match command {
        Command::Qsl => cmd_qsl(opts),
        Command::Fig1a => cmd_fig1a(opts),
        Command::Fig1b => cmd_fig1b(opts),
        Command::Scaling => cmd_scaling(opts),
        Command::Verify => cmd_verify(opts),
        Command::Qfi => cmd_qfi(opts),
        Command::Evolve => cmd_evolve(opts),
    })?;
    let dt = opts.config.integrator.dt;
    let calibration_dt = dt.min(CALIBRATION_MAX_DT);
    let metadata = Metadata {
        tool: "qsl",
        version: qsl_core::VERSION,
        command,
        format: opts.format,
        seed: opts.seed,
        dt,
        gamma_eff: GammaEff {
            factor: EMISSION_RATE_FACTOR,
            calibrated: calibrate_emission_rate(calibration_dt)?,
            calibration_dt,
        },
        notes: produced.notes,
        config: opts.config.clone(),
    };
    Ok(Outcome {
        body: produced.body,
        metadata,
        exit_code: produced.exit_code,
        warnings: produced.warnings,
    })
}

fn resolve(opts: &RunOptions, fallback: &str) -> Result<(Preset, Params), CliError> {
    let preset = Preset::from_config(&opts.config.preset, fallback)?;
    let params = preset.resolve_parameters(&opts.config.parameters)?;
    Ok((preset, params))
}

fn target_error(e: QslError) -> CliError {
    match e {
        QslError::InvalidArgument(msg) => CliError::Config(format!("parameters.theta_target: {msg}")),
        other => other.into(),
    }
}

fn cmd_qsl(opts: &RunOptions) -> Result<Produced, CliError> {
    let (preset, params) = resolve(opts, "emission")?;
    let points: Vec<(f64, Params)> = match &opts.config.sweep {
        Some(sweep) => {
            preset.check_sweep_name(&sweep.name)?;
            sweep.values.iter().map(|&v| (v, params.with(&sweep.name, v))).collect()
        }
        None => vec![(params.get("theta_target"), params)],
    };
    let rows = points
        .par_iter()
        .map(|(value, p)| -> Result<Vec<Cell>, CliError> {
            let q = preset.quantities(p)?;
            let theta = p.get("theta_target");
            let (upper, lower, status) = match t_qsl(&q, theta) {
                Ok(t) => (Cell::Num(t), Cell::Num(qsl_lower_bound(&q, theta).map_err(target_error)?), "ok"),
                Err(QslError::FrozenDynamics) => (Cell::Empty, Cell::Empty, "frozen_dynamics"),
                Err(e) => return Err(target_error(e)),
            };
            Ok(vec![
                Cell::Num(*value),
                Cell::Num(q.delta_h0),
                Cell::Num(q.g_term),
                Cell::Num(q.e_term),
                Cell::Num(q.v_coeff),
                upper,
                lower,
                Cell::Text(status.into()),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new([
        "sweep_value", "delta_h0", "g_term", "e_term", "v_coeff", "t_qsl", "t_lower", "status",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    let mut out = Produced::table(table, opts.format);
    out.notes.push(format!(
        "preset {}; sweep axis {}",
        preset.name(),
        opts.config.sweep.as_ref().map_or("theta_target (single point)", |s| s.name.as_str())
    ));
    Ok(out)
}

fn cmd_fig1a(opts: &RunOptions) -> Result<Produced, CliError> {
    let f = &opts.config.fig1a;
    if f.omegas.is_empty() || f.omegas.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(CliError::Config("fig1a.omegas: need positive finite values".into()));
    }
    if !(f.gamma_min > 0.0 && f.gamma_max > f.gamma_min && f.gamma_max.is_finite()) {
        return Err(CliError::Config("fig1a: need 0 < gamma_min < gamma_max".into()));
    }
    if f.points_per_decade == 0 {
        return Err(CliError::Config("fig1a.points_per_decade: must be positive".into()));
    }
    let rows = f
        .gammas()
        .par_iter()
        .map(|&gamma| -> Result<Vec<Cell>, CliError> {
            let mut row = vec![Cell::Num(gamma)];
            for &omega in &f.omegas {
                let (model, psi0) = dephasing_model(&DephasingQubitParams { omega, gamma, theta: f.theta })?;
                let q = compute_quantities(&model, &psi0)?;
                row.push(Cell::Num(t_qsl(&q, f.theta_target).map_err(target_error)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = vec!["gamma".to_string()];
    columns.extend(f.omegas.iter().map(|w| format!("t_qsl_omega_{w}")));
    let mut table = Table::new(columns);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Produced::table(table, opts.format))
}

fn cmd_fig1b(opts: &RunOptions) -> Result<Produced, CliError> {
    let f = &opts.config.fig1b;
    let cap = FRAC_PI_2 - FIG1B_EDGE;
    if f.theta_targets.is_empty() || f.theta_targets.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(CliError::Config("fig1b.theta_targets: need positive finite angles".into()));
    }
    let targets: Vec<f64> = f.theta_targets.iter().map(|&t| t.min(cap)).collect();
    let (model, psi0) = spontaneous_emission_model(f.gamma).map_err(|e| CliError::Config(format!("fig1b.gamma: {e}")))?;
    let q = compute_quantities(&model, &psi0)?;
    let max_target = targets.iter().copied().fold(0.0, f64::max);
    let integ = opts.config.integrator;
    let traj = evolve_with(&model, &psi0, &EvolveOptions::new(integ.horizon, integ.dt).stop_at(max_target))?;
    let mut table = Table::new(["theta_target", "t_exa", "t_first_passage", "t_qsl"]);
    let mut warnings = Vec::new();
    for &theta in &targets {
        let passage = match first_passage_time(&traj, theta) {
            Ok(t) => Some(t),
            Err(QslError::Unreachable { .. }) => {
                warnings.push(format!("theta_target {theta}: not reached within horizon {}", integ.horizon));
                None
            }
            Err(e) => return Err(e.into()),
        };
        table.push(vec![
            Cell::Num(theta),
            Cell::Num(exact_emission_time(f.gamma, theta)?),
            passage.into(),
            Cell::Num(t_qsl(&q, theta)?),
        ]);
    }
    let mut out = Produced::table(table, opts.format);
    out.warnings = warnings;
    out.notes.push(format!(
        "t_exa = -ln(cos^2 theta) / gamma_eff with gamma_eff = {EMISSION_RATE_FACTOR} * gamma (L = sqrt(gamma) sigma_-, excited population exp(-gamma t))"
    ));
    out.notes.push(format!("targets capped at pi/2 - {FIG1B_EDGE}"));
    Ok(out)
}

fn cmd_scaling(opts: &RunOptions) -> Result<Produced, CliError> {
    let s = &opts.config.scaling;
    let base = ProductModelParams {
        n: s.n,
        omega: s.omega,
        gamma: s.gamma,
        theta: s.theta,
        dissipation: s.dissipation,
    };
    let points: Vec<(f64, ProductModelParams)> = match s.axis {
        ScalingAxis::N => s.n_values.iter().map(|&n| (n as f64, ProductModelParams { n, ..base })).collect(),
        ScalingAxis::Gamma => s
            .gamma_values
            .iter()
            .map(|&gamma| (gamma, ProductModelParams { gamma, ..base }))
            .collect(),
    };
    if points.is_empty() {
        return Err(CliError::Config("scaling: axis values must be nonempty".into()));
    }
    let samples = points
        .par_iter()
        .map(|(x, p)| -> Result<(f64, f64), CliError> {
            let q = product_quantities_analytic(p).map_err(|e| CliError::Config(format!("scaling: {e}")))?;
            Ok((*x, t_qsl(&q, s.theta_target).map_err(target_error)?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let axis = match s.axis {
        ScalingAxis::N => "n",
        ScalingAxis::Gamma => "gamma",
    };
    let mut table = Table::new([axis, "t_qsl"]);
    for &(x, t) in &samples {
        let key = match s.axis {
            ScalingAxis::N => Cell::Int(x as u64),
            ScalingAxis::Gamma => Cell::Num(x),
        };
        table.push(vec![key, Cell::Num(t)]);
    }
    let mut warnings = Vec::new();
    match scaling_exponent(&samples) {
        Ok(exponent) => table.summary.push(("fitted_exponent".into(), exponent)),
        Err(e) => warnings.push(format!("no exponent fitted: {e}")),
    }
    let mut out = Produced::table(table, opts.format);
    out.warnings = warnings;
    out.notes.push("t_qsl from the O(n) product-state closed form".into());
    Ok(out)
}

fn verify_summary(report: &VerifyReport) -> Table {
    let mut t = Table::new(["property", "checked", "passed", "violations", "skipped", "worst_margin"]);
    for p in &report.properties {
        t.push(vec![
            Cell::Text(p.name.clone()),
            Cell::Int(p.checked as u64),
            Cell::Int(p.passed as u64),
            Cell::Int(p.violations as u64),
            Cell::Int(p.skipped as u64),
            p.worst_margin.into(),
        ]);
    }
    t
}

fn cmd_verify(opts: &RunOptions) -> Result<Produced, CliError> {
    let mut cfg = opts.config.verify.clone();
    cfg.seed = opts.seed;
    let report = run_verification(&cfg)?;
    let body = match opts.format {
        Format::Json => to_json_bytes(&report),
        Format::Csv => verify_summary(&report).to_csv(),
    };
    let warnings = report
        .properties
        .iter()
        .filter(|p| p.violations > 0)
        .map(|p| format!("{}: {} violation(s), worst margin {:e}", p.name, p.violations, p.worst_margin.unwrap_or(0.0)))
        .collect();
    Ok(Produced {
        body,
        notes: vec!["margin = rhs - lhs; a case fails when margin < -tolerance".into()],
        warnings,
        exit_code: if report.total_violations > 0 { exit::VIOLATION } else { exit::OK },
    })
}

fn cmd_qfi(opts: &RunOptions) -> Result<Produced, CliError> {
    let (preset, params) = resolve(opts, "emission")?;
    let (model, psi0) = preset.build(&params)?;
    let grid = &opts.config.qfi.t_grid;
    let reports = verify_fisher_tradeoff_with(&model, &psi0, grid, opts.config.integrator.dt, FISHER_TOLERANCE)
        .map_err(|e| match e {
            QslError::InvalidArgument(msg) => CliError::Config(format!("qfi.t_grid: {msg}")),
            other => other.into(),
        })?;
    let mut table = Table::new(["t", "fidelity", "qfi_estimate", "qfi_bound", "satisfied", "warning"]);
    let mut outside = 0;
    for r in &reports {
        if !r.in_window {
            outside += 1;
        }
        table.push(vec![
            Cell::Num(r.horizon_t),
            Cell::Num(r.fidelity_at_t),
            Cell::Num(r.qfi_estimate),
            Cell::Num(r.qfi_bound),
            Cell::Bool(r.satisfied),
            Cell::Text(if r.in_window { String::new() } else { "outside_short_time_window".into() }),
        ]);
    }
    let mut out = Produced::table(table, opts.format);
    if outside > 0 {
        out.warnings.push(format!("{outside} grid point(s) outside the short-time window"));
    }
    out.notes.push(format!("preset {}", preset.name()));
    Ok(out)
}

fn cmd_evolve(opts: &RunOptions) -> Result<Produced, CliError> {
    let (preset, params) = resolve(opts, "emission")?;
    let (model, psi0) = preset.build(&params)?;
    let integ = opts.config.integrator;
    let every = opts.config.evolve.every;
    if every == 0 {
        return Err(CliError::Config("evolve.every: must be positive".into()));
    }
    let traj = evolve_with(&model, &psi0, &EvolveOptions::new(integ.horizon, integ.dt))?;
    let last = traj.len() - 1;
    let picks: Vec<usize> = (0..=last).step_by(every).chain((last % every != 0).then_some(last)).collect();
    let rows = picks
        .par_iter()
        .map(|&k| -> Result<Vec<Cell>, CliError> {
            let rho = traj.states[k].matrix();
            Ok(vec![
                Cell::Num(traj.times[k]),
                Cell::Num(traj.bures_angles[k]),
                Cell::Num((rho.trace().re - 1.0).abs()),
                Cell::Num(min_eigenvalue_hermitian(rho)?),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(["t", "theta", "trace_drift", "min_eig"]);
    rows.into_iter().for_each(|r| table.push(r));
    let mut out = Produced::table(table, opts.format);
    out.notes.push(format!(
        "preset {}; step {}; renormalizations {}",
        preset.name(),
        traj.step,
        traj.renormalizations
    ));
    Ok(out)
}
