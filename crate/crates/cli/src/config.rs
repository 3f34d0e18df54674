// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configuration and preset resolution.
//!
//! ```toml
//! seed = 0
//! workers = 2
//!
//! [preset]
//! name = "dephasing"          # or inline hamiltonian / lindblad_ops / psi0
//!
//! [parameters]
//! omega = 1.0
//! gamma = 0.5
//! theta_target = 0.785
//!
//! [integrator]
//! dt = 1e-3
//! horizon = 20.0
//!
//! [sweep]
//! name = "gamma"
//! values = [0.0, 0.5, 1.0]
//! ```

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use qsl_core::models::{
    dephasing_model, product_model_dense, product_quantities_analytic, spontaneous_emission_model,
    DephasingQubitParams, LocalDissipation, ProductModelParams,
};
use qsl_core::{compute_quantities, ComplexMatrix, LindbladModel, PureState, QslError, QslQuantities, VerifyConfig, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `[re, im]` pairs, row-major.
pub type MatrixEntries = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub preset: PresetConfig,
    pub parameters: BTreeMap<String, f64>,
    pub integrator: IntegratorConfig,
    pub sweep: Option<SweepConfig>,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
    pub qfi: QfiConfig,
    pub fig1a: Fig1aConfig,
    pub fig1b: Fig1bConfig,
    pub scaling: ScalingConfig,
    pub evolve: EvolveConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PresetConfig {
    pub name: Option<String>,
    pub dissipation: Option<LocalDissipation>,
    pub hamiltonian: Option<MatrixEntries>,
    pub lindblad_ops: Option<Vec<MatrixEntries>>,
    pub psi0: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub horizon: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, horizon: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..points)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (points - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QfiConfig {
    pub t_grid: Vec<f64>,
}

impl Default for QfiConfig {
    fn default() -> Self {
        Self { t_grid: log_grid(1e-3, 1e-1, 9) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig1aConfig {
    pub omegas: Vec<f64>,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points_per_decade: usize,
    pub theta: f64,
    pub theta_target: f64,
}

impl Default for Fig1aConfig {
    fn default() -> Self {
        Self {
            omegas: vec![0.01, 1.0, 4.0],
            gamma_min: 1e-3,
            gamma_max: 1e4,
            points_per_decade: 8,
            theta: FRAC_PI_4,
            theta_target: FRAC_PI_4,
        }
    }
}

impl Fig1aConfig {
    pub fn gammas(&self) -> Vec<f64> {
        let decades = (self.gamma_max / self.gamma_min).log10();
        let points = (decades * self.points_per_decade as f64).round() as usize + 1;
        log_grid(self.gamma_min, self.gamma_max, points.max(2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig1bConfig {
    pub gamma: f64,
    pub theta_targets: Vec<f64>,
}

impl Default for Fig1bConfig {
    fn default() -> Self {
        let mut theta_targets: Vec<f64> = (1..=31).map(|k| k as f64 / 20.0).collect();
        theta_targets.push(FRAC_PI_4);
        theta_targets.sort_by(f64::total_cmp);
        Self { gamma: 1.0, theta_targets }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingAxis {
    N,
    Gamma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub axis: ScalingAxis,
    pub n_values: Vec<usize>,
    pub gamma_values: Vec<f64>,
    /// System size used when sweeping `gamma`.
    pub n: usize,
    pub omega: f64,
    pub gamma: f64,
    pub theta: f64,
    pub theta_target: f64,
    pub dissipation: LocalDissipation,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            axis: ScalingAxis::N,
            n_values: (4..=14).map(|k| 1usize << k).collect(),
            gamma_values: log_grid(1e1, 1e4, 7),
            n: 64,
            omega: 0.1,
            gamma: 10.0,
            theta: FRAC_PI_4,
            theta_target: FRAC_PI_4,
            dissipation: LocalDissipation::EverySite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    /// Emit every `every`-th grid point (the final point is always emitted).
    pub every: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { every: 1 }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks everything that does not depend on which command runs.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(CliError::Config("sweep.values: must be nonempty".into()));
            }
            if let Some(v) = sweep.values.iter().find(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("sweep.values: non-finite value {v}")));
            }
        }
        for (k, v) in &self.parameters {
            if !v.is_finite() {
                return Err(CliError::Config(format!("parameters.{k}: non-finite value {v}")));
            }
        }
        let IntegratorConfig { dt, horizon } = self.integrator;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CliError::Config(format!("integrator.dt: must be positive, got {dt}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(CliError::Config(format!("integrator.horizon: must be positive, got {horizon}")));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers: must be at least 1".into()));
        }
        if self.preset.hamiltonian.is_some() {
            self.preset.inline()?;
        }
        Ok(())
    }
}

fn matrix_from_entries(field: &str, rows: &MatrixEntries) -> Result<ComplexMatrix, CliError> {
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Config(format!("{field}: matrix must be square and nonempty")));
    }
    let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::from_vec(dim, data).map_err(|e| CliError::Config(format!("{field}: {e}")))
}

impl PresetConfig {
    fn inline(&self) -> Result<(LindbladModel, PureState), CliError> {
        let h_rows = self
            .hamiltonian
            .as_ref()
            .ok_or_else(|| CliError::Config("preset.hamiltonian: required for inline models".into()))?;
        if self.name.is_some() {
            return Err(CliError::Config(
                "preset: give either name or inline matrices, not both".into(),
            ));
        }
        let h = matrix_from_entries("preset.hamiltonian", h_rows)?;
        let dev = h.hermitian_deviation();
        if !h.is_hermitian(qsl_core::linalg::HERM_TOL) {
            return Err(CliError::Config(format!(
                "preset.hamiltonian: Hermitian invariant violated (max |H - H^dagger| = {dev:e})"
            )));
        }
        let ops = self
            .lindblad_ops
            .iter()
            .flatten()
            .enumerate()
            .map(|(k, rows)| matrix_from_entries(&format!("preset.lindblad_ops[{k}]"), rows))
            .collect::<Result<Vec<_>, _>>()?;
        let model = LindbladModel::new(h, ops).map_err(|e| CliError::Config(format!("preset: {e}")))?;
        let amps = self
            .psi0
            .as_ref()
            .ok_or_else(|| CliError::Config("preset.psi0: required for inline models".into()))?;
        let psi0 = PureState::new(amps.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .map_err(|e| CliError::Config(format!("preset.psi0: {e}")))?;
        if psi0.dim() != model.dim() {
            return Err(CliError::Config(format!(
                "preset.psi0: dimension {} does not match hamiltonian dimension {}",
                psi0.dim(),
                model.dim()
            )));
        }
        Ok((model, psi0))
    }
}

/// A preset resolved against the parameter table.
#[derive(Debug, Clone)]
pub enum Preset {
    Dephasing,
    Emission,
    Product(LocalDissipation),
    Inline(Box<(LindbladModel, PureState)>),
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Dephasing => "dephasing",
            Preset::Emission => "emission",
            Preset::Product(_) => "product",
            Preset::Inline(_) => "inline",
        }
    }

    /// Parameter keys accepted by this preset (besides `theta_target`).
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Preset::Dephasing => &["omega", "gamma", "theta"],
            Preset::Emission => &["gamma"],
            Preset::Product(_) => &["n", "omega", "gamma", "theta"],
            Preset::Inline(_) => &[],
        }
    }

    fn defaults(&self) -> &'static [(&'static str, f64)] {
        match self {
            Preset::Dephasing => &[("omega", 1.0), ("gamma", 1.0), ("theta", FRAC_PI_4)],
            Preset::Emission => &[("gamma", 1.0)],
            Preset::Product(_) => &[("n", 4.0), ("omega", 0.1), ("gamma", 10.0), ("theta", FRAC_PI_4)],
            Preset::Inline(_) => &[],
        }
    }

    pub fn from_config(cfg: &PresetConfig, fallback: &str) -> Result<Self, CliError> {
        if cfg.hamiltonian.is_some() {
            return Ok(Preset::Inline(Box::new(cfg.inline()?)));
        }
        if cfg.lindblad_ops.is_some() || cfg.psi0.is_some() {
            return Err(CliError::Config("preset.hamiltonian: required for inline models".into()));
        }
        let name = cfg.name.as_deref().unwrap_or(fallback);
        if cfg.dissipation.is_some() && name != "product" {
            return Err(CliError::Config(format!(
                "preset.dissipation: only valid for the product preset, not {name:?}"
            )));
        }
        match name {
            "dephasing" => Ok(Preset::Dephasing),
            "emission" => Ok(Preset::Emission),
            "product" => Ok(Preset::Product(cfg.dissipation.unwrap_or_default())),
            other => Err(CliError::Config(format!(
                "preset.name: unknown preset {other:?} (expected dephasing, emission or product)"
            ))),
        }
    }

    /// Merges defaults with the user table, rejecting unknown keys.
    pub fn resolve_parameters(&self, user: &BTreeMap<String, f64>) -> Result<Params, CliError> {
        let mut values: BTreeMap<String, f64> =
            self.defaults().iter().map(|&(k, v)| (k.to_string(), v)).collect();
        values.insert("theta_target".into(), FRAC_PI_4);
        for (k, &v) in user {
            if !values.contains_key(k) {
                return Err(CliError::Config(format!(
                    "parameters.{k}: not a parameter of the {} preset (accepted: {})",
                    self.name(),
                    self.accepted().join(", ")
                )));
            }
            values.insert(k.clone(), v);
        }
        Ok(Params(values))
    }

    fn accepted(&self) -> Vec<&'static str> {
        let mut names = self.parameter_names().to_vec();
        names.push("theta_target");
        names
    }

    pub fn check_sweep_name(&self, name: &str) -> Result<(), CliError> {
        if self.accepted().contains(&name) {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "sweep.name: {name:?} is not a parameter of the {} preset (accepted: {})",
                self.name(),
                self.accepted().join(", ")
            )))
        }
    }

    fn product_params(&self, p: &Params) -> Result<ProductModelParams, CliError> {
        let Preset::Product(dissipation) = *self else {
            unreachable!("product parameters requested for another preset")
        };
        let n = p.get("n");
        if !(n >= 1.0 && n.fract() == 0.0 && n <= u32::MAX as f64) {
            return Err(CliError::Config(format!("parameters.n: must be a positive integer, got {n}")));
        }
        Ok(ProductModelParams {
            n: n as usize,
            omega: p.get("omega"),
            gamma: p.get("gamma"),
            theta: p.get("theta"),
            dissipation,
        })
    }

    pub fn build(&self, p: &Params) -> Result<(LindbladModel, PureState), CliError> {
        let built = match self {
            Preset::Dephasing => dephasing_model(&DephasingQubitParams {
                omega: p.get("omega"),
                gamma: p.get("gamma"),
                theta: p.get("theta"),
            }),
            Preset::Emission => spontaneous_emission_model(p.get("gamma")),
            Preset::Product(_) => product_model_dense(&self.product_params(p)?),
            Preset::Inline(pair) => Ok((**pair).clone()),
        };
        built.map_err(config_error)
    }

    /// Initial-state quantities; the product preset uses the O(n) closed form.
    pub fn quantities(&self, p: &Params) -> Result<QslQuantities, CliError> {
        match self {
            Preset::Product(_) => product_quantities_analytic(&self.product_params(p)?).map_err(config_error),
            _ => {
                let (model, psi0) = self.build(p)?;
                compute_quantities(&model, &psi0).map_err(CliError::from)
            }
        }
    }
}

fn config_error(e: QslError) -> CliError {
    match e {
        QslError::InvalidArgument(msg) => CliError::Config(format!("parameters: {msg}")),
        other => CliError::from(other),
    }
}

/// Fully resolved parameter table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }

    pub fn with(&self, key: &str, value: f64) -> Self {
        let mut next = self.0.clone();
        next.insert(key.to_string(), value);
        Self(next)
    }
}
