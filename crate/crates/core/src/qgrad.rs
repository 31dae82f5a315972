//! The differentiable quantum layer: embed, run the trainable circuit, read
//! out.
//!
//! Gradients w.r.t. circuit parameters use the two-point parameter-shift
//! rule `df/dt = (f(t + pi/2) - f(t - pi/2)) / 2`, exact for every trainable
//! gate here (RX/RY/RZ and the three RZ/RY factors of ROT3). Input gradients
//! for angle and IQP embeddings shift the embedding angles with the same rule
//! (CPHASE has generator `|11><11|`, eigenvalues 0 and 1, so the same
//! formula applies) and chain through `d(x_i x_j)/dx_i = x_j`. Amplitude
//! embeddings fall back to central differences with `h = 1e-6` on the raw
//! features.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::embed::{amplitude_embed, angle_circuit, iqp_circuit, AngleSource, EmbeddingKind, EncodingCircuit};
use crate::measure::{measure, MeasurementKind};
use crate::qcircuit::CircuitKind;
use crate::qstate::{CircuitSpec, StateVector};
use crate::{Error, Result};

pub const DEFAULT_QUBITS: usize = 8;

/// Step used for the amplitude-embedding input gradient.
pub const AMPLITUDE_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct QuantumLayerConfig {
    pub n_qubits: usize,
    pub embedding: EmbeddingKind,
    pub circuit: CircuitKind,
    pub measurement: MeasurementKind,
}

impl Default for QuantumLayerConfig {
    fn default() -> Self {
        QuantumLayerConfig {
            n_qubits: DEFAULT_QUBITS,
            embedding: EmbeddingKind::default(),
            circuit: CircuitKind::strongly_entangling(2),
            measurement: MeasurementKind::PauliZ,
        }
    }
}

impl QuantumLayerConfig {
    pub fn input_width(&self) -> usize {
        self.embedding.input_width(self.n_qubits)
    }

    pub fn output_width(&self) -> usize {
        self.measurement.output_width(self.n_qubits)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Encoder {
    Circuit(EncodingCircuit),
    Amplitude,
}

/// A built quantum layer. Cheap to evaluate repeatedly; building it
/// expands the circuit family once.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumLayer {
    n_qubits: usize,
    embedding: EmbeddingKind,
    encoder: Encoder,
    circuit: CircuitSpec,
    measurement: MeasurementKind,
}

impl QuantumLayer {
    pub fn new(config: &QuantumLayerConfig) -> Result<Self> {
        let circuit = config.circuit.build(config.n_qubits)?;
        Self::with_circuit(config.embedding, circuit, config.measurement)
    }

    /// Layer around an arbitrary trainable circuit (which may be empty).
    pub fn with_circuit(embedding: EmbeddingKind, circuit: CircuitSpec, measurement: MeasurementKind) -> Result<Self> {
        embedding.validate()?;
        let n_qubits = circuit.n_qubits();
        let encoder = match embedding {
            EmbeddingKind::Angle { axis } => Encoder::Circuit(angle_circuit(n_qubits, axis)?),
            EmbeddingKind::Iqp { repeats } => Encoder::Circuit(iqp_circuit(n_qubits, repeats)?),
            EmbeddingKind::Amplitude => Encoder::Amplitude,
        };
        Ok(QuantumLayer { n_qubits, embedding, encoder, circuit, measurement })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn embedding(&self) -> EmbeddingKind {
        self.embedding
    }

    pub fn measurement(&self) -> MeasurementKind {
        self.measurement
    }

    pub fn circuit(&self) -> &CircuitSpec {
        &self.circuit
    }

    pub fn input_width(&self) -> usize {
        self.embedding.input_width(self.n_qubits)
    }

    pub fn output_width(&self) -> usize {
        self.measurement.output_width(self.n_qubits)
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    fn check(&self, input: &[f64], params: &[f64]) -> Result<()> {
        if input.len() != self.input_width() {
            return Err(Error::Layer(format!(
                "quantum layer expects {} input(s), got {}",
                self.input_width(),
                input.len()
            )));
        }
        if params.len() != self.n_params() {
            return Err(Error::Layer(format!(
                "quantum layer expects {} parameter(s), got {}",
                self.n_params(),
                params.len()
            )));
        }
        Ok(())
    }

    fn check_upstream(&self, upstream: &[f64]) -> Result<()> {
        if upstream.len() != self.output_width() {
            return Err(Error::Layer(format!(
                "upstream gradient has {} entries, layer outputs {}",
                upstream.len(),
                self.output_width()
            )));
        }
        Ok(())
    }

    fn embed_state(&self, input: &[f64]) -> Result<StateVector> {
        match &self.encoder {
            Encoder::Circuit(enc) => enc.encode(input),
            Encoder::Amplitude => amplitude_embed(input, self.n_qubits),
        }
    }

    fn readout(&self, mut state: StateVector, params: &[f64]) -> Result<Vec<f64>> {
        self.circuit.apply_to(&mut state, params)?;
        Ok(measure(&state, self.measurement))
    }

    pub fn forward(&self, input: &[f64], params: &[f64]) -> Result<Vec<f64>> {
        self.check(input, params)?;
        let state = self.embed_state(input)?;
        self.readout(state, params)
    }

    /// `d(upstream . f)/d params`.
    pub fn param_grad(&self, input: &[f64], params: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        self.check(input, params)?;
        self.check_upstream(upstream)?;
        let embedded = self.embed_state(input)?;
        let mut shifted = params.to_vec();
        let mut grad = vec![0.0; params.len()];
        for (j, g) in grad.iter_mut().enumerate() {
            shifted[j] = params[j] + FRAC_PI_2;
            let plus = self.readout(embedded.clone(), &shifted)?;
            shifted[j] = params[j] - FRAC_PI_2;
            let minus = self.readout(embedded.clone(), &shifted)?;
            shifted[j] = params[j];
            *g = shift_contraction(upstream, &plus, &minus);
        }
        Ok(grad)
    }

    /// `d(upstream . f)/d input`.
    pub fn input_grad(&self, input: &[f64], params: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        self.check(input, params)?;
        self.check_upstream(upstream)?;
        match &self.encoder {
            Encoder::Circuit(enc) => self.encoding_input_grad(enc, input, params, upstream),
            Encoder::Amplitude => self.amplitude_input_grad(input, params, upstream),
        }
    }

    fn encoding_input_grad(
        &self,
        enc: &EncodingCircuit,
        input: &[f64],
        params: &[f64],
        upstream: &[f64],
    ) -> Result<Vec<f64>> {
        let angles = enc.angles(input);
        let mut shifted = angles.clone();
        let mut grad = vec![0.0; input.len()];
        for (k, source) in enc.sources.iter().enumerate() {
            let run = |angle: f64, shifted: &mut Vec<f64>| -> Result<Vec<f64>> {
                shifted[k] = angle;
                let mut state = StateVector::zero(self.n_qubits)?;
                enc.circuit.apply_to(&mut state, shifted)?;
                self.readout(state, params)
            };
            let plus = run(angles[k] + FRAC_PI_2, &mut shifted)?;
            let minus = run(angles[k] - FRAC_PI_2, &mut shifted)?;
            shifted[k] = angles[k];
            let d_angle = shift_contraction(upstream, &plus, &minus);
            match *source {
                AngleSource::Feature(i) => grad[i] += d_angle,
                AngleSource::Product(i, j) => {
                    grad[i] += d_angle * input[j];
                    grad[j] += d_angle * input[i];
                }
            }
        }
        Ok(grad)
    }

    fn amplitude_input_grad(&self, input: &[f64], params: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        let h = AMPLITUDE_FD_STEP;
        let mut probe = input.to_vec();
        let mut grad = vec![0.0; input.len()];
        for (i, g) in grad.iter_mut().enumerate() {
            probe[i] = input[i] + h;
            let plus = self.readout(amplitude_embed(&probe, self.n_qubits)?, params)?;
            probe[i] = input[i] - h;
            let minus = self.readout(amplitude_embed(&probe, self.n_qubits)?, params)?;
            probe[i] = input[i];
            *g = upstream.iter().zip(plus.iter().zip(&minus)).map(|(u, (p, m))| u * (p - m)).sum::<f64>() / (2.0 * h);
        }
        Ok(grad)
    }
}

fn shift_contraction(upstream: &[f64], plus: &[f64], minus: &[f64]) -> f64 {
    upstream.iter().zip(plus.iter().zip(minus)).map(|(u, (p, m))| u * (p - m)).sum::<f64>() / 2.0
}

pub fn quantum_forward(input: &[f64], params: &[f64], config: &QuantumLayerConfig) -> Result<Vec<f64>> {
    QuantumLayer::new(config)?.forward(input, params)
}

pub fn param_shift_grad(
    input: &[f64],
    params: &[f64],
    config: &QuantumLayerConfig,
    upstream: &[f64],
) -> Result<Vec<f64>> {
    QuantumLayer::new(config)?.param_grad(input, params, upstream)
}

pub fn input_grad(input: &[f64], params: &[f64], config: &QuantumLayerConfig, upstream: &[f64]) -> Result<Vec<f64>> {
    QuantumLayer::new(config)?.input_grad(input, params, upstream)
}
