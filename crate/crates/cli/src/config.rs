//! Run configuration: per-command defaults, overlaid by an optional JSON
//! file, overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qbpm::propagator::DispersionPolynomial;
use qbpm::scenarios::{DoubleSlitParams, GaussianParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    DoubleSlit,
    #[serde(rename = "gaussian-2d")]
    #[value(name = "gaussian-2d")]
    Gaussian2d,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    DoubleSlit,
    #[serde(rename = "gaussian-2d")]
    Gaussian2d,
    Propagate,
    ErrorAnalysis,
    GateCount,
    ExportQasm,
}

/// Grid and wavelength for user-supplied fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    pub wavelength: f64,
    pub dx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateCountParams {
    pub n_qubits: usize,
    pub order: u32,
}

/// Fully resolved settings of one run. Written next to the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub scenario: ScenarioKind,
    pub seed: u64,
    /// Shots of the single sampled run.
    pub n_shots: u64,
    /// Shot counts of the repeated-sampling sweep.
    pub shots_sweep: Vec<u64>,
    pub n_sim: usize,
    /// Propagation distances in meters; for the Gaussian beam, in units of
    /// its Rayleigh length.
    pub z: Vec<f64>,
    /// Dispersion coefficients by order.
    pub dispersion: BTreeMap<u32, f64>,
    pub double_slit: DoubleSlitParams,
    pub gaussian: GaussianParams,
    pub custom: CustomParams,
    pub gate_count: GateCountParams,
    pub input: Option<PathBuf>,
    pub format: Format,
    pub verify: bool,
    /// Largest accepted amplitude deviation between the quantum and
    /// classical routes when verifying.
    pub tolerance: f64,
}

impl RunConfig {
    pub fn defaults(command: CommandKind) -> Self {
        let scenario = match command {
            CommandKind::Gaussian2d => ScenarioKind::Gaussian2d,
            CommandKind::Propagate => ScenarioKind::Custom,
            _ => ScenarioKind::DoubleSlit,
        };
        let (z, n_shots, shots_sweep) = match command {
            CommandKind::DoubleSlit => (vec![0.0, 0.05, 0.1], 100_000, vec![]),
            CommandKind::Gaussian2d => (
                vec![0.0, 1.0, 2.0, 3.0],
                50_000,
                vec![100, 300, 1_000, 3_000, 10_000, 50_000],
            ),
            CommandKind::ErrorAnalysis => (
                vec![0.0, 0.1, 0.11, 0.12, 0.13],
                100_000,
                vec![1_000, 10_000, 100_000, 1_000_000],
            ),
            CommandKind::Propagate => (vec![1e-3], 100_000, vec![]),
            CommandKind::ExportQasm => (vec![0.1], 100_000, vec![]),
            CommandKind::GateCount => (vec![], 100_000, vec![]),
        };
        RunConfig {
            command,
            scenario,
            seed: 1,
            n_shots,
            shots_sweep,
            n_sim: 100,
            z,
            dispersion: DispersionPolynomial::paraxial().coefficients().clone(),
            double_slit: DoubleSlitParams::default(),
            gaussian: GaussianParams::default(),
            custom: CustomParams {
                wavelength: 532e-9,
                dx: 1e-6,
            },
            gate_count: GateCountParams {
                n_qubits: 15,
                order: 2,
            },
            input: None,
            format: Format::Csv,
            verify: false,
            tolerance: 1e-9,
        }
    }

    /// Defaults for `command` with the JSON document at `path` merged on top.
    pub fn load(command: CommandKind, path: Option<&Path>) -> Result<Self, CliError> {
        let defaults = Self::defaults(command);
        let Some(path) = path else {
            return Ok(defaults);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let overlay: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if !overlay.is_object() {
            return Err(CliError::Config(format!(
                "{}: expected a JSON object",
                path.display()
            )));
        }
        let mut merged = serde_json::to_value(&defaults).expect("config serializes");
        merge(&mut merged, overlay);
        let mut config: RunConfig = serde_json::from_value(merged)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // the subcommand decides what runs, whatever the file says
        config.command = command;
        Ok(config)
    }

    pub fn polynomial(&self) -> Result<DispersionPolynomial, CliError> {
        Ok(DispersionPolynomial::from_terms(
            self.dispersion.iter().map(|(&p, &c)| (p, c)),
        )?)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        if self.z.iter().any(|z| !(z.is_finite() && *z >= 0.0)) {
            return bad("propagation distances must be finite and >= 0");
        }
        if self.n_shots == 0 || self.shots_sweep.contains(&0) {
            return bad("shot counts must be positive");
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return bad("tolerance must be >= 0");
        }
        self.polynomial()?;
        Ok(())
    }
}

/// Recursively overwrites `base` with the fields present in `overlay`.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}
