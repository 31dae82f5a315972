//! Reference quantum simulator built the slow, obvious way: textbook 2x2
//! matrices, Kronecker products with identities, and projector sums for
//! controlled gates. Shares no code with the library's kernels.

#![allow(dead_code)]

use qser_core::qstate::{Complex, GateKind, GateOp};

pub type Mat = Vec<Vec<Complex>>;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn expi(phi: f64) -> Complex {
    c(phi.cos(), phi.sin())
}

pub fn identity(dim: usize) -> Mat {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn dagger(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm_sqr().sqrt()).fold(0.0, f64::max)
}

pub fn apply(m: &Mat, v: &[Complex]) -> Vec<Complex> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

// Textbook single-qubit matrices.

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Mat {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

pub fn hadamard() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]
}

/// exp(-i theta X / 2)
pub fn rx(theta: f64) -> Mat {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]
}

pub fn ry(theta: f64) -> Mat {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![vec![c(co, 0.0), c(-si, 0.0)], vec![c(si, 0.0), c(co, 0.0)]]
}

pub fn rz(theta: f64) -> Mat {
    vec![vec![expi(-theta / 2.0), c(0.0, 0.0)], vec![c(0.0, 0.0), expi(theta / 2.0)]]
}

/// RZ(c) RY(b) RZ(a), written out in closed form.
pub fn rot3(a: f64, b: f64, cc: f64) -> Mat {
    let (co, si) = ((b / 2.0).cos(), (b / 2.0).sin());
    vec![
        vec![expi(-(a + cc) / 2.0) * co, -expi((a - cc) / 2.0) * si],
        vec![expi(-(a - cc) / 2.0) * si, expi((a + cc) / 2.0) * co],
    ]
}

fn proj(bit: usize) -> Mat {
    let mut m = vec![vec![c(0.0, 0.0); 2]; 2];
    m[bit][bit] = c(1.0, 0.0);
    m
}

/// `ops[q]` on qubit q (identity where `None`), qubit 0 most significant.
fn tensor_of(n: usize, ops: &[(usize, Mat)]) -> Mat {
    let mut out = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        let m = ops.iter().find(|(w, _)| *w == q).map(|(_, m)| m.clone()).unwrap_or_else(|| identity(2));
        out = kron(&out, &m);
    }
    out
}

pub fn single(n: usize, wire: usize, m: Mat) -> Mat {
    tensor_of(n, &[(wire, m)])
}

/// |0><0|_c (x) I + |1><1|_c (x) X_t
pub fn cnot(n: usize, control: usize, target: usize) -> Mat {
    add(&tensor_of(n, &[(control, proj(0))]), &tensor_of(n, &[(control, proj(1)), (target, pauli_x())]))
}

/// I + (e^{i theta} - 1) |11><11|
pub fn cphase(n: usize, a: usize, b: usize, theta: f64) -> Mat {
    let both = tensor_of(n, &[(a, proj(1)), (b, proj(1))]);
    let scale = expi(theta) - c(1.0, 0.0);
    add(&identity(1 << n), &both.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect())
}

/// Full-register matrix of a bound gate, from the oracle's own matrices.
pub fn gate(n: usize, g: &GateOp) -> Mat {
    let w = g.wires();
    let p = g.params();
    match g.kind() {
        GateKind::Rx => single(n, w[0], rx(p[0])),
        GateKind::Ry => single(n, w[0], ry(p[0])),
        GateKind::Rz => single(n, w[0], rz(p[0])),
        GateKind::Rot3 => single(n, w[0], rot3(p[0], p[1], p[2])),
        GateKind::H => single(n, w[0], hadamard()),
        GateKind::X => single(n, w[0], pauli_x()),
        GateKind::Z => single(n, w[0], pauli_z()),
        GateKind::Cnot => cnot(n, w[0], w[1]),
        GateKind::CPhase => cphase(n, w[0], w[1], p[0]),
    }
}

pub fn circuit(n: usize, gates: &[GateOp]) -> Mat {
    gates.iter().fold(identity(1 << n), |u, g| matmul(&gate(n, g), &u))
}

pub fn zero_state(n: usize) -> Vec<Complex> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

/// <psi| O |psi> for a Hermitian O.
pub fn expectation(op: &Mat, psi: &[Complex]) -> f64 {
    apply(op, psi).iter().zip(psi).map(|(a, b)| (b.conj() * a).re).sum()
}

/// Random gate on `n` qubits drawn from every kind, using a caller-supplied
/// uniform source in [0, 1).
pub fn random_gate(n: usize, mut u: impl FnMut() -> f64) -> GateOp {
    let tau = std::f64::consts::TAU;
    let wire = |u: &mut dyn FnMut() -> f64| ((u() * n as f64) as usize).min(n - 1);
    let kind = ((u() * 9.0) as usize).min(8);
    let a = wire(&mut u);
    let b = if n > 1 {
        let mut b = wire(&mut u);
        while b == a {
            b = wire(&mut u);
        }
        b
    } else {
        a
    };
    let th = (u() - 0.5) * 2.0 * tau;
    match (kind, n) {
        (7, 2..) => GateOp::cnot(a, b),
        (8, 2..) => GateOp::cphase(a, b, th),
        (0, _) => GateOp::rx(a, th),
        (1, _) => GateOp::ry(a, th),
        (2, _) => GateOp::rz(a, th),
        (3, _) => GateOp::rot3(a, th, (u() - 0.5) * tau, (u() - 0.5) * tau),
        (4, _) => GateOp::h(a),
        (5, _) => GateOp::x(a),
        _ => GateOp::z(a),
    }
}

/// A random circuit whose every angle is trainable, the flat parameter
/// vector that reproduces the drawn angles, and the drawn gates themselves.
pub fn random_circuit(
    n: usize,
    n_gates: usize,
    mut u: impl FnMut() -> f64,
) -> (qser_core::qstate::CircuitSpec, Vec<f64>, Vec<GateOp>) {
    let mut spec = qser_core::qstate::CircuitSpec::new(n).unwrap();
    let mut params = Vec::new();
    let mut gates = Vec::new();
    for _ in 0..n_gates {
        let g = random_gate(n, &mut u);
        spec.push_trainable(g).unwrap();
        params.extend_from_slice(g.params());
        gates.push(g);
    }
    (spec, params, gates)
}
