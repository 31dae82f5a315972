//! The JSON run configuration.
//!
//! Every section is optional and falls back to its defaults; unknown keys
//! are rejected. Errors carry the path of the offending field.

use std::path::Path;

use qser_core::data::{SplitSpec, ValenceScheme};
use qser_core::features::MelConfig;
use qser_core::qcircuit::CircuitKind;
use qser_core::qgrad::QuantumLayer;
use qser_core::qstate::MAX_QUBITS;
use qser_core::train::{Architecture, GridSpace, HyperParams, DEFAULT_GRID_BUDGET};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub split: SplitSpec,
    pub valence_scheme: ValenceScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub space: GridSpace,
    /// Epochs per grid point.
    pub budget: usize,
    /// Retrain the best point for `train.epochs` epochs afterwards.
    pub retrain_best: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { space: GridSpace::default(), budget: DEFAULT_GRID_BUDGET, retrain_best: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub features: MelConfig,
    pub data: DataConfig,
    pub model: Architecture,
    pub train: HyperParams,
    pub grid: GridConfig,
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn core_err(field: &str, e: qser_core::Error) -> Error {
    config_err(field, e.to_string())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            config_err(&field, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Range checks beyond what the types enforce.
    pub fn validate(&self) -> Result<()> {
        self.features.validate().map_err(|e| core_err("features", e))?;
        self.data.split.validate().map_err(|e| core_err("data.split", e))?;

        let m = &self.model;
        for (name, v) in [
            ("conv1_channels", m.conv1_channels),
            ("conv1_kernel", m.conv1_kernel),
            ("conv2_channels", m.conv2_channels),
            ("conv2_kernel", m.conv2_kernel),
            ("pool", m.pool),
            ("amplitude_width", m.amplitude_width),
            ("surrogate_width", m.surrogate_width),
        ] {
            if v == 0 {
                return Err(config_err(&format!("model.{name}"), "must be >= 1"));
            }
        }

        validate_train(&self.train, "train")?;

        let g = &self.grid;
        let s = &g.space;
        for (name, len) in [
            ("learning_rates", s.learning_rates.len()),
            ("optimizers", s.optimizers.len()),
            ("weight_decays", s.weight_decays.len()),
            ("embeddings", s.embeddings.len()),
            ("circuits", s.circuits.len()),
            ("measurements", s.measurements.len()),
        ] {
            if len == 0 {
                return Err(config_err(&format!("grid.space.{name}"), "must list at least one value"));
            }
        }
        for (i, lr) in s.learning_rates.iter().enumerate() {
            if !(lr.is_finite() && *lr >= 0.0) {
                return Err(config_err(&format!("grid.space.learning_rates[{i}]"), "must be finite and >= 0"));
            }
        }
        for (i, wd) in s.weight_decays.iter().enumerate() {
            if !(wd.is_finite() && *wd >= 0.0) {
                return Err(config_err(&format!("grid.space.weight_decays[{i}]"), "must be finite and >= 0"));
            }
        }
        for (i, c) in s.circuits.iter().enumerate() {
            validate_circuit(c, &format!("grid.space.circuits[{i}]"))?;
        }
        for (i, e) in s.embeddings.iter().enumerate() {
            e.validate().map_err(|err| core_err(&format!("grid.space.embeddings[{i}]"), err))?;
        }
        Ok(())
    }
}

fn validate_circuit(c: &CircuitKind, field: &str) -> Result<()> {
    if c.layers() == 0 {
        return Err(config_err(&format!("{field}.layers"), "must be >= 1"));
    }
    if let CircuitKind::RandomLayers { rots_per_layer, imprimitive_ratio, .. } = *c {
        if rots_per_layer == Some(0) {
            return Err(config_err(&format!("{field}.rots_per_layer"), "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&imprimitive_ratio) {
            return Err(config_err(&format!("{field}.imprimitive_ratio"), "must lie in [0, 1]"));
        }
    }
    Ok(())
}

pub fn validate_train(hp: &HyperParams, field: &str) -> Result<()> {
    if !(hp.learning_rate.is_finite() && hp.learning_rate >= 0.0) {
        return Err(config_err(&format!("{field}.learning_rate"), "must be finite and >= 0"));
    }
    if !(hp.weight_decay.is_finite() && hp.weight_decay >= 0.0) {
        return Err(config_err(&format!("{field}.weight_decay"), "must be finite and >= 0"));
    }
    if hp.batch_size == 0 {
        return Err(config_err(&format!("{field}.batch_size"), "must be >= 1"));
    }
    if let Some(q) = &hp.quantum {
        if !(2..=MAX_QUBITS).contains(&q.n_qubits) {
            return Err(config_err(&format!("{field}.quantum.n_qubits"), format!("must be in 2..={MAX_QUBITS}")));
        }
        q.embedding.validate().map_err(|e| core_err(&format!("{field}.quantum.embedding"), e))?;
        validate_circuit(&q.circuit, &format!("{field}.quantum.circuit"))?;
        QuantumLayer::new(q).map_err(|e| core_err(&format!("{field}.quantum"), e))?;
    }
    hp.validate().map_err(|e| core_err(field, e))
}
