//! Classical-to-quantum encodings.
//!
//! Angle and IQP embeddings are expressed as circuits whose angle slots are
//! filled from the input features, so the same parameter-shift machinery that
//! differentiates the trainable circuit also differentiates the embedding.

use alloc::format;
use alloc::vec::Vec;

use crate::qstate::{CircuitSpec, GateOp, StateVector, MAX_QUBITS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Axis {
    #[default]
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum EmbeddingKind {
    Angle {
        #[cfg_attr(feature = "serde", serde(default))]
        axis: Axis,
    },
    Amplitude,
    Iqp {
        #[cfg_attr(feature = "serde", serde(default = "default_repeats"))]
        repeats: usize,
    },
}

#[cfg(feature = "serde")]
fn default_repeats() -> usize {
    1
}

impl Default for EmbeddingKind {
    fn default() -> Self {
        EmbeddingKind::Angle { axis: Axis::X }
    }
}

impl EmbeddingKind {
    pub const fn iqp() -> Self {
        EmbeddingKind::Iqp { repeats: 1 }
    }

    /// Number of classical features consumed on `n_qubits` qubits.
    pub fn input_width(&self, n_qubits: usize) -> usize {
        match self {
            EmbeddingKind::Amplitude => 1 << n_qubits,
            _ => n_qubits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EmbeddingKind::Iqp { repeats: 0 } => Err(Error::Config("IQP repeats must be >= 1".into())),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EmbeddingKind::Angle { .. } => "angle",
            EmbeddingKind::Amplitude => "amplitude",
            EmbeddingKind::Iqp { .. } => "iqp",
        }
    }
}

/// Where one embedding angle comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleSource {
    Feature(usize),
    /// `features[i] * features[j]`
    Product(usize, usize),
}

/// A feature-driven circuit: angle slot `k` of `circuit` takes the value
/// described by `sources[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingCircuit {
    pub circuit: CircuitSpec,
    pub sources: Vec<AngleSource>,
}

impl EncodingCircuit {
    pub fn angles(&self, features: &[f64]) -> Vec<f64> {
        self.sources
            .iter()
            .map(|s| match *s {
                AngleSource::Feature(i) => features[i],
                AngleSource::Product(i, j) => features[i] * features[j],
            })
            .collect()
    }

    pub fn encode(&self, features: &[f64]) -> Result<StateVector> {
        check_width(features, self.circuit.n_qubits())?;
        let mut state = StateVector::zero(self.circuit.n_qubits())?;
        self.circuit.apply_to(&mut state, &self.angles(features))?;
        Ok(state)
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Embedding(format!("need 1..={MAX_QUBITS} features, got {n}")))
    }
}

fn check_width(features: &[f64], n_qubits: usize) -> Result<()> {
    if features.len() != n_qubits {
        return Err(Error::Embedding(format!("expected {n_qubits} feature(s), got {}", features.len())));
    }
    if features.iter().any(|f| !f.is_finite()) {
        return Err(Error::Embedding("non-finite feature".into()));
    }
    Ok(())
}

/// `R_axis(features[i])` on every qubit `i`.
pub fn angle_circuit(n_qubits: usize, axis: Axis) -> Result<EncodingCircuit> {
    check_qubit_count(n_qubits)?;
    let mut circuit = CircuitSpec::new(n_qubits)?;
    for q in 0..n_qubits {
        let gate = match axis {
            Axis::X => GateOp::rx(q, 0.0),
            Axis::Y => GateOp::ry(q, 0.0),
            Axis::Z => GateOp::rz(q, 0.0),
        };
        circuit.push_trainable(gate)?;
    }
    let sources = (0..n_qubits).map(AngleSource::Feature).collect();
    Ok(EncodingCircuit { circuit, sources })
}

/// Per repeat: H on every qubit, `RZ(features[i])` on qubit `i`, then
/// `CPHASE(features[i] * features[j])` for every pair `i < j`.
pub fn iqp_circuit(n_qubits: usize, repeats: usize) -> Result<EncodingCircuit> {
    check_qubit_count(n_qubits)?;
    if repeats == 0 {
        return Err(Error::Embedding("IQP repeats must be >= 1".into()));
    }
    let mut circuit = CircuitSpec::new(n_qubits)?;
    let mut sources = Vec::new();
    for _ in 0..repeats {
        for q in 0..n_qubits {
            circuit.push(GateOp::h(q))?;
        }
        for q in 0..n_qubits {
            circuit.push_trainable(GateOp::rz(q, 0.0))?;
            sources.push(AngleSource::Feature(q));
        }
        for i in 0..n_qubits {
            for j in i + 1..n_qubits {
                circuit.push_trainable(GateOp::cphase(i, j, 0.0))?;
                sources.push(AngleSource::Product(i, j));
            }
        }
    }
    Ok(EncodingCircuit { circuit, sources })
}

pub fn angle_embed(features: &[f64], axis: Axis) -> Result<StateVector> {
    check_qubit_count(features.len())?;
    angle_circuit(features.len(), axis)?.encode(features)
}

pub fn iqp_embed(features: &[f64], repeats: usize) -> Result<StateVector> {
    check_qubit_count(features.len())?;
    iqp_circuit(features.len(), repeats)?.encode(features)
}

/// Zero-pads `features` to `2^n_qubits`, L2-normalizes and uses the result
/// as real amplitudes.
pub fn amplitude_embed(features: &[f64], n_qubits: usize) -> Result<StateVector> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Embedding(format!("n_qubits must be in 1..={MAX_QUBITS}")));
    }
    let dim = 1usize << n_qubits;
    if features.is_empty() || features.len() > dim {
        return Err(Error::Embedding(format!(
            "amplitude embedding on {n_qubits} qubit(s) takes 1..={dim} features, got {}",
            features.len()
        )));
    }
    if features.iter().any(|f| !f.is_finite()) {
        return Err(Error::Embedding("non-finite feature".into()));
    }
    let norm = libm::sqrt(features.iter().map(|f| f * f).sum::<f64>());
    if norm == 0.0 {
        return Err(Error::Embedding("all-zero features cannot be normalized".into()));
    }
    let mut amps = alloc::vec![crate::qstate::Complex::new(0.0, 0.0); dim];
    for (a, f) in amps.iter_mut().zip(features) {
        a.re = f / norm;
    }
    StateVector::from_amplitudes(n_qubits, amps)
}

/// Embeds `features` on `n_qubits` qubits with the given scheme.
pub fn embed(features: &[f64], n_qubits: usize, kind: &EmbeddingKind) -> Result<StateVector> {
    match *kind {
        EmbeddingKind::Angle { axis } => {
            check_width(features, n_qubits)?;
            angle_embed(features, axis)
        }
        EmbeddingKind::Amplitude => amplitude_embed(features, n_qubits),
        EmbeddingKind::Iqp { repeats } => {
            check_width(features, n_qubits)?;
            iqp_embed(features, repeats)
        }
    }
}
