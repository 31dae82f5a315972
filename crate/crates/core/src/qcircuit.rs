//! Trainable circuit families.
//!
//! * Strongly entangling layers: per layer a `ROT3` on every qubit followed
//!   by a nearest-neighbour CNOT ring `i -> (i + 1) mod n`.
//! * Random layers: per layer `rots_per_layer` slots drawn from the
//!   `RandomLayers` stream of [`crate::rng`] (sub-stream = layer index).
//!   Each slot draws `u = uniform()`. If `u < imprimitive_ratio` it emits a
//!   CNOT with `control = below(n)` and `target = below(n - 1)` (shifted up
//!   by one when `>= control`). Otherwise it emits a trainable rotation of
//!   kind `[RX, RY, RZ][below(3)]` on wire `below(n)`.

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::qstate::{CircuitSpec, GateOp};
use crate::rng::{SeededRng, Stream};
use crate::{Error, Result};

pub const DEFAULT_RANDOM_SEED: u64 = 42;
pub const DEFAULT_IMPRIMITIVE_RATIO: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum CircuitKind {
    StronglyEntangling {
        layers: usize,
    },
    RandomLayers {
        layers: usize,
        /// `None` means one slot per qubit.
        #[cfg_attr(feature = "serde", serde(default))]
        rots_per_layer: Option<usize>,
        #[cfg_attr(feature = "serde", serde(default = "default_seed"))]
        seed: u64,
        #[cfg_attr(feature = "serde", serde(default = "default_ratio"))]
        imprimitive_ratio: f64,
    },
}

#[cfg(feature = "serde")]
fn default_seed() -> u64 {
    DEFAULT_RANDOM_SEED
}

#[cfg(feature = "serde")]
fn default_ratio() -> f64 {
    DEFAULT_IMPRIMITIVE_RATIO
}

impl CircuitKind {
    pub const fn strongly_entangling(layers: usize) -> Self {
        CircuitKind::StronglyEntangling { layers }
    }

    /// Random layers with the default slot count, seed and ratio.
    pub const fn random_layers(layers: usize) -> Self {
        CircuitKind::RandomLayers {
            layers,
            rots_per_layer: None,
            seed: DEFAULT_RANDOM_SEED,
            imprimitive_ratio: DEFAULT_IMPRIMITIVE_RATIO,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CircuitKind::StronglyEntangling { .. } => "strongly_entangling",
            CircuitKind::RandomLayers { .. } => "random_layers",
        }
    }

    pub fn layers(&self) -> usize {
        match *self {
            CircuitKind::StronglyEntangling { layers } | CircuitKind::RandomLayers { layers, .. } => layers,
        }
    }

    pub fn build(&self, n_qubits: usize) -> Result<CircuitSpec> {
        match *self {
            CircuitKind::StronglyEntangling { layers } => build_strongly_entangling(n_qubits, layers),
            CircuitKind::RandomLayers { layers, rots_per_layer, seed, imprimitive_ratio } => {
                build_random_layers(n_qubits, layers, rots_per_layer.unwrap_or(n_qubits), seed, imprimitive_ratio)
            }
        }
    }
}

fn check_common(n_qubits: usize, n_layers: usize) -> Result<()> {
    if n_qubits < 2 {
        return Err(Error::Config(format!("circuit layers need at least 2 qubits, got {n_qubits}")));
    }
    if n_layers == 0 {
        return Err(Error::Config("circuit needs at least one layer".into()));
    }
    Ok(())
}

pub fn build_strongly_entangling(n_qubits: usize, n_layers: usize) -> Result<CircuitSpec> {
    check_common(n_qubits, n_layers)?;
    let mut circuit = CircuitSpec::new(n_qubits)?;
    for _ in 0..n_layers {
        for q in 0..n_qubits {
            circuit.push_trainable(GateOp::rot3(q, 0.0, 0.0, 0.0))?;
        }
        for q in 0..n_qubits {
            circuit.push(GateOp::cnot(q, (q + 1) % n_qubits))?;
        }
    }
    Ok(circuit)
}

pub fn build_random_layers(
    n_qubits: usize,
    n_layers: usize,
    rots_per_layer: usize,
    seed: u64,
    imprimitive_ratio: f64,
) -> Result<CircuitSpec> {
    check_common(n_qubits, n_layers)?;
    if rots_per_layer == 0 {
        return Err(Error::Config("rots_per_layer must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&imprimitive_ratio) {
        return Err(Error::Config(format!("imprimitive_ratio must lie in [0, 1], got {imprimitive_ratio}")));
    }
    let mut circuit = CircuitSpec::new(n_qubits)?;
    for layer in 0..n_layers {
        let mut rng = SeededRng::new(seed, Stream::RandomLayers, layer as u32);
        for _ in 0..rots_per_layer {
            if rng.uniform() < imprimitive_ratio {
                let control = rng.below(n_qubits);
                let mut target = rng.below(n_qubits - 1);
                if target >= control {
                    target += 1;
                }
                circuit.push(GateOp::cnot(control, target))?;
            } else {
                let kind = rng.below(3);
                let wire = rng.below(n_qubits);
                let gate = match kind {
                    0 => GateOp::rx(wire, 0.0),
                    1 => GateOp::ry(wire, 0.0),
                    _ => GateOp::rz(wire, 0.0),
                };
                circuit.push_trainable(gate)?;
            }
        }
    }
    Ok(circuit)
}

pub fn param_count(circuit: &CircuitSpec) -> usize {
    circuit.n_params()
}

/// One gate per line, trainable slots shown as `p<index>`, then the
/// trainable-parameter count.
pub fn render(circuit: &CircuitSpec) -> String {
    let mut out = String::new();
    let map = circuit.param_index_map();
    for (g, gate) in circuit.gates().iter().enumerate() {
        let _ = write!(out, "{:<6}", gate.kind().name());
        for w in gate.wires() {
            let _ = write!(out, " q{w}");
        }
        for (slot, value) in gate.params().iter().enumerate() {
            match map.iter().position(|s| s.gate == g && s.slot == slot) {
                Some(pos) => {
                    let _ = write!(out, " p{pos}");
                }
                None => {
                    let _ = write!(out, " {value:.6}");
                }
            }
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{} trainable parameters", circuit.n_params());
    out
}
