//! Read-out of a statevector into classical features.
//!
//! All read-outs are exact expectation values or probabilities; nothing is
//! sampled. The "Z" read-out is the per-qubit probability of outcome 1,
//! `(1 - <Z_i>) / 2`, which makes `ZPlusPauliZ` equal to `(1 + <Z_i>) / 2`.

use alloc::vec::Vec;

use crate::qstate::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasurementKind {
    #[default]
    PauliZ,
    PauliX,
    ZProb,
    ZPlusPauliZ,
    Probability,
}

impl MeasurementKind {
    pub fn output_width(&self, n_qubits: usize) -> usize {
        match self {
            MeasurementKind::Probability => 1 << n_qubits,
            _ => n_qubits,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeasurementKind::PauliZ => "pauli_z",
            MeasurementKind::PauliX => "pauli_x",
            MeasurementKind::ZProb => "z_prob",
            MeasurementKind::ZPlusPauliZ => "z_plus_pauli_z",
            MeasurementKind::Probability => "probability",
        }
    }
}

/// `<Z_i>` for every qubit.
pub fn expect_pauliz(state: &StateVector) -> Vec<f64> {
    let n = state.n_qubits();
    let mut out = alloc::vec![0.0; n];
    for (b, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        for (q, o) in out.iter_mut().enumerate() {
            if b & (1 << (n - 1 - q)) == 0 {
                *o += p;
            } else {
                *o -= p;
            }
        }
    }
    out
}

/// `<X_i>` for every qubit: `2 Re sum_{b: bit_i = 0} conj(a_b) a_{b | bit_i}`.
pub fn expect_paulix(state: &StateVector) -> Vec<f64> {
    let amps = state.amplitudes();
    (0..state.n_qubits())
        .map(|q| {
            let bit = state.bit(q);
            2.0 * amps
                .iter()
                .enumerate()
                .filter(|(b, _)| b & bit == 0)
                .map(|(b, a)| (a.conj() * amps[b | bit]).re)
                .sum::<f64>()
        })
        .collect()
}

/// Probability that each qubit reads 1.
pub fn prob_one_z(state: &StateVector) -> Vec<f64> {
    let n = state.n_qubits();
    let mut out = alloc::vec![0.0; n];
    for (b, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        for (q, o) in out.iter_mut().enumerate() {
            if b & (1 << (n - 1 - q)) != 0 {
                *o += p;
            }
        }
    }
    out
}

/// Born-rule distribution over the computational basis.
pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

pub fn measure(state: &StateVector, kind: MeasurementKind) -> Vec<f64> {
    match kind {
        MeasurementKind::PauliZ => expect_pauliz(state),
        MeasurementKind::PauliX => expect_paulix(state),
        MeasurementKind::ZProb => prob_one_z(state),
        MeasurementKind::Probability => probabilities(state),
        MeasurementKind::ZPlusPauliZ => {
            prob_one_z(state).into_iter().zip(expect_pauliz(state)).map(|(p, z)| p + z).collect()
        }
    }
}
