//! Dense statevector simulation.
//!
//! Amplitudes are stored as a contiguous `Vec<Complex64>` of length `2^n`.
//! Qubit 0 is the most significant bit of the basis index, so qubit `q`
//! toggles the bit `1 << (n - 1 - q)`.
//!
//! Gate conventions:
//!
//! * `RX(t) = exp(-i t X / 2)`, `RY(t) = exp(-i t Y / 2)`, `RZ(t) = exp(-i t Z / 2)`
//! * `ROT3(a, b, c) = RZ(c) RY(b) RZ(a)`, i.e. `RZ(a)` acts first
//! * `CPHASE(t) = diag(1, 1, 1, e^{i t})`
//! * `CNOT` takes `wires = [control, target]`

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

pub const MAX_QUBITS: usize = 12;

/// Largest register [`dense_unitary`] will expand.
pub const MAX_DENSE_QUBITS: usize = 6;

pub type Complex = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn cis(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rot3,
    H,
    X,
    Z,
    Cnot,
    CPhase,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::CPhase => 2,
            _ => 1,
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::CPhase => 1,
            GateKind::Rot3 => 3,
            GateKind::H | GateKind::X | GateKind::Z | GateKind::Cnot => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Rot3 => "ROT3",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::CPhase => "CPHASE",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate with concrete wires and angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    wires: [usize; 2],
    params: [f64; 3],
}

impl GateOp {
    /// Checks wire and parameter counts against `kind`. Range checks against
    /// a register happen in [`GateOp::validate`].
    pub fn new(kind: GateKind, wires: &[usize], params: &[f64]) -> Result<Self> {
        if wires.len() != kind.arity() {
            return Err(Error::Circuit(format!("{kind} takes {} wire(s), got {}", kind.arity(), wires.len())));
        }
        if params.len() != kind.n_params() {
            return Err(Error::Circuit(format!("{kind} takes {} parameter(s), got {}", kind.n_params(), params.len())));
        }
        let mut op = GateOp { kind, wires: [0; 2], params: [0.0; 3] };
        op.wires[..wires.len()].copy_from_slice(wires);
        op.params[..params.len()].copy_from_slice(params);
        Ok(op)
    }

    fn single(kind: GateKind, wire: usize, params: [f64; 3]) -> Self {
        GateOp { kind, wires: [wire, 0], params }
    }

    pub fn rx(wire: usize, theta: f64) -> Self {
        Self::single(GateKind::Rx, wire, [theta, 0.0, 0.0])
    }

    pub fn ry(wire: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry, wire, [theta, 0.0, 0.0])
    }

    pub fn rz(wire: usize, theta: f64) -> Self {
        Self::single(GateKind::Rz, wire, [theta, 0.0, 0.0])
    }

    pub fn rot3(wire: usize, a: f64, b: f64, c: f64) -> Self {
        Self::single(GateKind::Rot3, wire, [a, b, c])
    }

    pub fn h(wire: usize) -> Self {
        Self::single(GateKind::H, wire, [0.0; 3])
    }

    pub fn x(wire: usize) -> Self {
        Self::single(GateKind::X, wire, [0.0; 3])
    }

    pub fn z(wire: usize) -> Self {
        Self::single(GateKind::Z, wire, [0.0; 3])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp { kind: GateKind::Cnot, wires: [control, target], params: [0.0; 3] }
    }

    pub fn cphase(a: usize, b: usize, theta: f64) -> Self {
        GateOp { kind: GateKind::CPhase, wires: [a, b], params: [theta, 0.0, 0.0] }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires[..self.kind.arity()]
    }

    pub fn params(&self) -> &[f64] {
        &self.params[..self.kind.n_params()]
    }

    pub(crate) fn set_param(&mut self, slot: usize, value: f64) {
        self.params[slot] = value;
    }

    /// Wires distinct and below `n_qubits`, angles finite.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let wires = self.wires();
        if let Some(&w) = wires.iter().find(|&&w| w >= n_qubits) {
            return Err(Error::Circuit(format!("{} wire {w} out of range for {n_qubits} qubit(s)", self.kind)));
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::Circuit(format!("{} wires must be distinct", self.kind)));
        }
        if self.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::Circuit(format!("{} has a non-finite angle", self.kind)));
        }
        Ok(())
    }

    /// Local matrix of a single-qubit gate, `None` for two-qubit kinds.
    pub fn matrix_2x2(&self) -> Option<[[Complex64; 2]; 2]> {
        let p = self.params;
        Some(match self.kind {
            GateKind::Rx => rx_matrix(p[0]),
            GateKind::Ry => ry_matrix(p[0]),
            GateKind::Rz => rz_matrix(p[0]),
            GateKind::Rot3 => mat2_mul(&rz_matrix(p[2]), &mat2_mul(&ry_matrix(p[1]), &rz_matrix(p[0]))),
            GateKind::H => {
                let s = core::f64::consts::FRAC_1_SQRT_2;
                let s = Complex64::new(s, 0.0);
                [[s, s], [s, -s]]
            }
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::Cnot | GateKind::CPhase => return None,
        })
    }

    /// Local 4x4 matrix on `(wires[0], wires[1])` with local index
    /// `2 * bit(wires[0]) + bit(wires[1])`. `None` for single-qubit kinds.
    pub fn matrix_4x4(&self) -> Option<[[Complex64; 4]; 4]> {
        let mut m = [[ZERO; 4]; 4];
        match self.kind {
            GateKind::Cnot => {
                m[0][0] = ONE;
                m[1][1] = ONE;
                m[2][3] = ONE;
                m[3][2] = ONE;
            }
            GateKind::CPhase => {
                m[0][0] = ONE;
                m[1][1] = ONE;
                m[2][2] = ONE;
                m[3][3] = cis(self.params[0]);
            }
            _ => return None,
        }
        Some(m)
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for w in self.wires() {
            write!(f, " q{w}")?;
        }
        for p in self.params() {
            write!(f, " {p:.6}")?;
        }
        Ok(())
    }
}

fn rx_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new(libm::cos(theta / 2.0), 0.0);
    let s = Complex64::new(0.0, -libm::sin(theta / 2.0));
    [[c, s], [s, c]]
}

fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let c = libm::cos(theta / 2.0);
    let s = libm::sin(theta / 2.0);
    [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
}

fn rz_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    [[cis(-theta / 2.0), ZERO], [ZERO, cis(theta / 2.0)]]
}

fn mat2_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::Config(format!("n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}")))
    }
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be `2^n_qubits`, entries finite
    /// and the norm 1 within `1e-10`.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::Size(format!(
                "{} amplitudes for {n_qubits} qubit(s), expected {}",
                amps.len(),
                1usize << n_qubits
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Config("non-finite amplitude".into()));
        }
        let state = StateVector { n_qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!("state not normalized: |psi|^2 = {norm}")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &GateOp) {
        match gate.kind {
            GateKind::Cnot => {
                let c = self.bit(gate.wires[0]);
                let t = self.bit(gate.wires[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::CPhase => {
                let mask = self.bit(gate.wires[0]) | self.bit(gate.wires[1]);
                let phase = cis(gate.params[0]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= phase;
                    }
                }
            }
            GateKind::Rz => {
                let stride = self.bit(gate.wires[0]);
                let lo = cis(-gate.params[0] / 2.0);
                let hi = cis(gate.params[0] / 2.0);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & stride == 0 { lo } else { hi };
                }
            }
            _ => {
                let m = gate.matrix_2x2().expect("single-qubit gate");
                let stride = self.bit(gate.wires[0]);
                for block in self.amps.chunks_exact_mut(2 * stride) {
                    let (upper, lower) = block.split_at_mut(stride);
                    for (a0, a1) in upper.iter_mut().zip(lower.iter_mut()) {
                        let (x, y) = (*a0, *a1);
                        *a0 = m[0][0] * x + m[0][1] * y;
                        *a1 = m[1][0] * x + m[1][1] * y;
                    }
                }
            }
        }
    }

    /// Purity `Tr(rho^2)` of the reduced state of one qubit.
    pub fn reduced_purity(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::Circuit(format!("qubit {qubit} out of range")));
        }
        let bit = self.bit(qubit);
        let (mut p0, mut p1, mut coh) = (0.0, 0.0, ZERO);
        for (i, a) in self.amps.iter().enumerate() {
            if i & bit == 0 {
                p0 += a.norm_sqr();
                coh += a * self.amps[i | bit].conj();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok(p0 * p0 + p1 * p1 + 2.0 * coh.norm_sqr())
    }
}

/// `|0...0>` on `n_qubits` qubits.
pub fn new_zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::zero(n_qubits)
}

pub fn apply_gate(mut state: StateVector, gate: &GateOp) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Position of one trainable parameter inside a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamSlot {
    pub gate: usize,
    pub slot: usize,
}

/// Ordered gate list with trainable-parameter slots.
///
/// Trainable parameter `j` overwrites the angle at `param_index_map[j]` when
/// the circuit is applied; the angles stored in the gates themselves are used
/// for every slot that is not mapped.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<GateOp>,
    param_index_map: Vec<ParamSlot>,
    // gate -> slot -> parameter position
    bindings: Vec<[Option<usize>; 3]>,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(CircuitSpec { n_qubits, gates: Vec::new(), param_index_map: Vec::new(), bindings: Vec::new() })
    }

    pub fn from_parts(n_qubits: usize, gates: Vec<GateOp>, param_index_map: Vec<ParamSlot>) -> Result<Self> {
        let mut circuit = CircuitSpec::new(n_qubits)?;
        for gate in gates {
            circuit.push(gate)?;
        }
        for (pos, slot) in param_index_map.into_iter().enumerate() {
            let gate = circuit
                .gates
                .get(slot.gate)
                .ok_or_else(|| Error::Circuit(format!("parameter {pos} points at missing gate {}", slot.gate)))?;
            if slot.slot >= gate.kind.n_params() {
                return Err(Error::Circuit(format!(
                    "parameter {pos} points at slot {} of {} which has {} parameter(s)",
                    slot.slot,
                    gate.kind,
                    gate.kind.n_params()
                )));
            }
            let binding = &mut circuit.bindings[slot.gate][slot.slot];
            if binding.is_some() {
                return Err(Error::Circuit(format!(
                    "gate {} slot {} bound to more than one parameter",
                    slot.gate, slot.slot
                )));
            }
            *binding = Some(pos);
            circuit.param_index_map.push(slot);
        }
        Ok(circuit)
    }

    /// Appends a gate with fixed angles.
    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        self.bindings.push([None; 3]);
        Ok(())
    }

    /// Appends a gate and binds each of its angle slots to the next
    /// trainable parameter positions.
    pub fn push_trainable(&mut self, gate: GateOp) -> Result<()> {
        self.push(gate)?;
        let g = self.gates.len() - 1;
        for slot in 0..gate.kind.n_params() {
            self.bindings[g][slot] = Some(self.param_index_map.len());
            self.param_index_map.push(ParamSlot { gate: g, slot });
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn param_index_map(&self) -> &[ParamSlot] {
        &self.param_index_map
    }

    pub fn n_params(&self) -> usize {
        self.param_index_map.len()
    }

    /// Gate `index` with trainable slots filled from `params`.
    pub fn bound_gate(&self, index: usize, params: &[f64]) -> GateOp {
        let mut gate = self.gates[index];
        for (slot, pos) in self.bindings[index].iter().enumerate() {
            if let Some(pos) = pos {
                gate.set_param(slot, params[*pos]);
            }
        }
        gate
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Circuit(format!(
                "circuit has {} trainable parameter(s), got {}",
                self.n_params(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Circuit("non-finite circuit parameter".into()));
        }
        Ok(())
    }

    /// Runs the circuit on `state` in place.
    pub fn apply_to(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        if state.n_qubits != self.n_qubits {
            return Err(Error::Circuit(format!(
                "circuit on {} qubit(s) applied to a {}-qubit state",
                self.n_qubits, state.n_qubits
            )));
        }
        self.check_params(params)?;
        for i in 0..self.gates.len() {
            state.apply_unchecked(&self.bound_gate(i, params));
        }
        Ok(())
    }
}

pub fn apply_circuit(mut state: StateVector, circuit: &CircuitSpec, params: &[f64]) -> Result<StateVector> {
    circuit.apply_to(&mut state, params)?;
    Ok(state)
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        DenseMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        DenseMatrix { dim: n, data }
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        DenseMatrix { dim: n, data }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| libm::sqrt((a - b).norm_sqr())).fold(0.0, f64::max)
    }
}

/// Full-register matrix of one gate, built entry by entry from the local
/// gate matrix (no statevector kernel involved).
pub fn gate_unitary(gate: &GateOp, n_qubits: usize) -> Result<DenseMatrix> {
    gate.validate(n_qubits)?;
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Size(format!("dense unitary limited to {MAX_DENSE_QUBITS} qubits")));
    }
    let dim = 1usize << n_qubits;
    let bit = |q: usize| 1usize << (n_qubits - 1 - q);
    let mut data = vec![ZERO; dim * dim];
    if let Some(m) = gate.matrix_2x2() {
        let b = bit(gate.wires[0]);
        for row in 0..dim {
            for col in 0..dim {
                if row & !b == col & !b {
                    data[row * dim + col] = m[usize::from(row & b != 0)][usize::from(col & b != 0)];
                }
            }
        }
    } else {
        let m = gate.matrix_4x4().expect("two-qubit gate");
        let (b0, b1) = (bit(gate.wires[0]), bit(gate.wires[1]));
        let local = |i: usize| 2 * usize::from(i & b0 != 0) + usize::from(i & b1 != 0);
        let rest = !(b0 | b1);
        for row in 0..dim {
            for col in 0..dim {
                if row & rest == col & rest {
                    data[row * dim + col] = m[local(row)][local(col)];
                }
            }
        }
    }
    Ok(DenseMatrix { dim, data })
}

/// Unitary of the whole circuit as the ordered product of per-gate
/// full-register matrices. Serves as the reference for [`apply_circuit`].
pub fn dense_unitary(circuit: &CircuitSpec, params: &[f64]) -> Result<DenseMatrix> {
    if circuit.n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Size(format!(
            "dense unitary limited to {MAX_DENSE_QUBITS} qubits, circuit has {}",
            circuit.n_qubits
        )));
    }
    circuit.check_params(params)?;
    let mut u = DenseMatrix::identity(1 << circuit.n_qubits);
    for i in 0..circuit.gates.len() {
        u = gate_unitary(&circuit.bound_gate(i, params), circuit.n_qubits)?.mul(&u);
    }
    Ok(u)
}
