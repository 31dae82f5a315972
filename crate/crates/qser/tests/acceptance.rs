//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line; the process fails if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::{PI, TAU};
use std::ops::ControlFlow;
use std::path::Path;
use std::time::{Duration, Instant};

use common::oracle::{self, Mat};
use common::{central_diff, rel_err, Lcg};
use qser::config::RunConfig;
use qser::corpus::generate_synthetic;
use qser::grid::run_grid;
use qser::pipeline::{load_datasets, Datasets};
use qser_core::data::SynthConfig;
use qser_core::embed::{embed, Axis, EmbeddingKind};
use qser_core::features::{extract, AudioClip, MelConfig};
use qser_core::measure::{expect_pauliz, prob_one_z, probabilities, MeasurementKind};
use qser_core::nn::{
    conv2d, conv2d_backward, dense, dense_backward, maxpool2d, maxpool2d_backward, optimizer_step, relu, relu_backward,
    softmax_cross_entropy, OptimizerConfig, OptimizerKind, OptimizerState, Tensor,
};
use qser_core::qcircuit::CircuitKind;
use qser_core::qgrad::{QuantumLayer, QuantumLayerConfig};
use qser_core::qstate::{
    apply_circuit, dense_unitary, gate_unitary, new_zero_state, Complex, GateKind, GateOp, StateVector,
};
use qser_core::train::{
    build_classical, build_hybrid, build_model, train_model_with, Architecture, GridContext, GridResult, GridSpace,
    HyperParams, Model,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn to_mat(u: &qser_core::qstate::DenseMatrix) -> Mat {
    (0..u.dim()).map(|i| (0..u.dim()).map(|j| u.get(i, j)).collect()).collect()
}

fn max_vec_diff(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr().sqrt()).fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn t(shape: &[usize], data: Vec<f64>) -> Tensor {
    Tensor::new(shape.to_vec(), data).unwrap()
}

fn random_state(n: usize, rng: &mut Lcg) -> StateVector {
    let mut amps: Vec<Complex> = (0..1 << n).map(|_| oracle::c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(n, amps).unwrap()
}

fn quantum_core() -> Outcome {
    let start = Instant::now();
    let mut rng = Lcg(1001);
    let (mut state_err, mut dense_err) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let n = 1 + i % 4;
        let n_gates = 1 + (rng.uniform() * 30.0) as usize;
        let (spec, params, gates) = oracle::random_circuit(n, n_gates, || rng.uniform());
        let u = oracle::circuit(n, &gates);
        let psi0 = if i % 2 == 0 { new_zero_state(n).unwrap() } else { random_state(n, &mut rng) };
        let got = apply_circuit(psi0.clone(), &spec, &params).unwrap();
        state_err = state_err.max(max_vec_diff(got.amplitudes(), &oracle::apply(&u, psi0.amplitudes())));
        dense_err = dense_err.max(oracle::max_diff(&to_mat(&dense_unitary(&spec, &params).unwrap()), &u));
    }

    let kinds = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Rot3,
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::Cnot,
        GateKind::CPhase,
    ];
    let (mut unitary_err, mut gate_err, mut seen) = (0.0f64, 0.0f64, 0usize);
    for n in 1..=4 {
        for kind in kinds {
            if kind.arity() > n {
                continue;
            }
            for _ in 0..10 {
                let wires: Vec<usize> = if kind.arity() == 1 {
                    vec![(rng.uniform() * n as f64) as usize]
                } else {
                    let a = (rng.uniform() * n as f64) as usize;
                    vec![a, (a + 1 + (rng.uniform() * (n - 1) as f64) as usize) % n]
                };
                let params = rng.vec(kind.n_params(), -TAU, TAU);
                let g = GateOp::new(kind, &wires, &params).unwrap();
                let m = to_mat(&gate_unitary(&g, n).unwrap());
                let prod = oracle::matmul(&oracle::dagger(&m), &m);
                unitary_err = unitary_err.max(oracle::max_diff(&prod, &oracle::identity(1 << n)));
                gate_err = gate_err.max(oracle::max_diff(&m, &oracle::gate(n, &g)));
                seen += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = state_err < 1e-10 && dense_err < 1e-10 && unitary_err < 1e-10 && gate_err < 1e-10 && within(elapsed, 30);
    outcome(
        pass,
        format!(
            "200 circuits: state err {state_err:.1e}, dense err {dense_err:.1e}; {seen} gates: unitarity err {unitary_err:.1e}, oracle err {gate_err:.1e}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Every embedding x circuit pairing at n = 8, 50 random draws each.
fn embedding_circuit_sweep() -> Vec<StateVector> {
    let n = 8;
    let embeddings =
        [EmbeddingKind::Angle { axis: Axis::X }, EmbeddingKind::Amplitude, EmbeddingKind::Iqp { repeats: 1 }];
    let circuits = [CircuitKind::strongly_entangling(2), CircuitKind::random_layers(2)];
    let mut rng = Lcg(2002);
    let mut out = Vec::new();
    for e in &embeddings {
        for c in &circuits {
            let spec = c.build(n).unwrap();
            for _ in 0..50 {
                let x = rng.vec(e.input_width(n), -PI, PI);
                let p = rng.vec(spec.n_params(), 0.0, TAU);
                out.push(apply_circuit(embed(&x, n, e).unwrap(), &spec, &p).unwrap());
            }
        }
    }
    out
}

fn normalization() -> Outcome {
    let states = embedding_circuit_sweep();
    let worst = states
        .iter()
        .map(|s| (s.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    outcome(worst < 1e-10, format!("{} states, max |norm - 1| = {worst:.1e}", states.len()))
}

fn born_rule() -> Outcome {
    let states = embedding_circuit_sweep();
    let (mut sum_err, mut range_ok, mut amp_err, mut ident_err) = (0.0f64, true, 0.0f64, 0.0f64);
    for s in &states {
        let p = probabilities(s);
        sum_err = sum_err.max((p.iter().sum::<f64>() - 1.0).abs());
        range_ok &= p.iter().all(|v| (0.0..=1.0).contains(v));
        for (v, a) in p.iter().zip(s.amplitudes()) {
            amp_err = amp_err.max((v - a.norm_sqr()).abs());
        }
        for (one, z) in prob_one_z(s).iter().zip(expect_pauliz(s)) {
            ident_err = ident_err.max((one - (1.0 - z) / 2.0).abs());
        }
    }
    let pass = sum_err < 1e-10 && range_ok && amp_err < 1e-12 && ident_err < 1e-12;
    outcome(
        pass,
        format!(
            "{} states: max |sum - 1| = {sum_err:.1e}, in [0,1]: {range_ok}, max |p - |a|^2| = {amp_err:.1e}, max prob/<Z> identity err = {ident_err:.1e}",
            states.len()
        ),
    )
}

/// FD check of a model's loss gradient on ceil(1%) of each parameter array.
fn model_fd_worst(model: &mut Model, x: &Tensor, label: usize, rng: &mut Lcg) -> (f64, usize) {
    let loss = |m: &Model| -m.forward(x).unwrap()[label].ln();
    let (_, grads) = model.loss_and_grad(x, label).unwrap();
    let (mut worst, mut checked) = (0.0f64, 0);
    for (a, g) in grads.iter().enumerate() {
        let k = g.len().div_ceil(100);
        for _ in 0..k {
            let i = (rng.uniform() * g.len() as f64) as usize;
            let h = 1e-5;
            let orig = model.param_arrays()[a][i];
            model.param_arrays_mut()[a][i] = orig + h;
            let up = loss(model);
            model.param_arrays_mut()[a][i] = orig - h;
            let down = loss(model);
            model.param_arrays_mut()[a][i] = orig;
            worst = worst.max(rel_err(g[i], (up - down) / (2.0 * h), 1e-6));
            checked += 1;
        }
    }
    (worst, checked)
}

fn gradient_fidelity() -> Outcome {
    let start = Instant::now();
    let embeddings = [
        EmbeddingKind::Angle { axis: Axis::X },
        EmbeddingKind::Angle { axis: Axis::Y },
        EmbeddingKind::Angle { axis: Axis::Z },
        EmbeddingKind::Amplitude,
        EmbeddingKind::Iqp { repeats: 1 },
        EmbeddingKind::Iqp { repeats: 2 },
    ];
    let measurements = [
        MeasurementKind::PauliZ,
        MeasurementKind::PauliX,
        MeasurementKind::ZProb,
        MeasurementKind::ZPlusPauliZ,
        MeasurementKind::Probability,
    ];
    let mut rng = Lcg(4004);
    let (mut param_err, mut input_err) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let n = 2 + i % 3;
        let circuit = match i % 3 {
            0 => CircuitKind::strongly_entangling(1),
            1 => CircuitKind::strongly_entangling(2),
            _ => CircuitKind::RandomLayers { layers: 2, rots_per_layer: None, seed: i as u64, imprimitive_ratio: 0.3 },
        };
        let cfg = QuantumLayerConfig {
            n_qubits: n,
            embedding: embeddings[i % embeddings.len()],
            circuit,
            measurement: measurements[(i / 2) % measurements.len()],
        };
        let layer = QuantumLayer::new(&cfg).unwrap();
        let x = rng.vec(cfg.input_width(), -1.5, 1.5);
        let p = rng.vec(layer.n_params(), 0.0, TAU);
        let up = rng.vec(cfg.output_width(), -1.0, 1.0);
        let pg = layer.param_grad(&x, &p, &up).unwrap();
        let fp = |v: &[f64]| dot(&up, &layer.forward(&x, v).unwrap());
        for j in 0..p.len() {
            param_err = param_err.max((pg[j] - central_diff(fp, &p, j, 1e-4)).abs());
        }
        let ig = layer.input_grad(&x, &p, &up).unwrap();
        let fx = |v: &[f64]| dot(&up, &layer.forward(v, &p).unwrap());
        for j in 0..x.len() {
            input_err = input_err.max((ig[j] - central_diff(fx, &x, j, 1e-4)).abs());
        }
    }

    let arch = Architecture {
        conv1_channels: 3,
        conv1_kernel: 3,
        conv2_channels: 4,
        conv2_kernel: 3,
        pool: 2,
        amplitude_width: 6,
        surrogate_width: 8,
    };
    let input = [1, 24, 24];
    let x = t(&[24, 24], rng.vec(24 * 24, -1.0, 1.0));
    let (mut e2e_err, mut e2e_checked) = (0.0f64, 0);
    let configs = [
        (EmbeddingKind::Angle { axis: Axis::X }, CircuitKind::strongly_entangling(2), MeasurementKind::PauliZ),
        (EmbeddingKind::Amplitude, CircuitKind::strongly_entangling(1), MeasurementKind::ZPlusPauliZ),
        (EmbeddingKind::iqp(), CircuitKind::random_layers(2), MeasurementKind::Probability),
    ];
    for (label, (embedding, circuit, measurement)) in configs.into_iter().enumerate() {
        let q = QuantumLayerConfig { n_qubits: 4, embedding, circuit, measurement };
        let hp = HyperParams { quantum: Some(q), seed: 12, ..HyperParams::default() };
        let mut model = build_hybrid(&hp, &arch, &input, 4).unwrap();
        let (worst, checked) = model_fd_worst(&mut model, &x, label, &mut rng);
        e2e_err = e2e_err.max(worst);
        e2e_checked += checked;
    }
    let elapsed = start.elapsed();
    let pass = param_err < 1e-6 && input_err < 1e-5 && e2e_err < 1e-4 && within(elapsed, 300);
    outcome(
        pass,
        format!(
            "100 configs: param err {param_err:.1e}, input err {input_err:.1e}; end-to-end rel err {e2e_err:.1e} over {e2e_checked} sampled params; {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Purity of qubit 0 from an explicit partial trace.
fn purity_q0(psi: &[Complex]) -> f64 {
    let half = psi.len() / 2;
    let mut rho = [[oracle::c(0.0, 0.0); 2]; 2];
    for (a, row) in rho.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            for r in 0..half {
                *cell += psi[a * half + r] * psi[b * half + r].conj();
            }
        }
    }
    rho.iter().flatten().map(|z| z.norm_sqr()).sum()
}

fn entanglement() -> Outcome {
    let spec = CircuitKind::strongly_entangling(1).build(4).unwrap();
    let mut rng = Lcg(5005);
    let entangled = (0..100)
        .filter(|_| {
            let p = rng.vec(spec.n_params(), 0.0, TAU);
            let s = apply_circuit(new_zero_state(4).unwrap(), &spec, &p).unwrap();
            purity_q0(s.amplitudes()) < 1.0 - 1e-6
        })
        .count();
    outcome(entangled >= 95, format!("{entangled}/100 draws below purity 1 - 1e-6"))
}

fn classical_nn() -> Outcome {
    let mut rng = Lcg(6006);
    let mut worst = 0.0f64;
    let mut fd = |analytic: &[f64], f: &dyn Fn(&[f64]) -> f64, at: &[f64]| {
        for i in 0..at.len() {
            worst = worst.max(rel_err(analytic[i], central_diff(f, at, i, 1e-5), 1e-8));
        }
    };

    for stride in [1, 2] {
        let x = rng.vec(2 * 7 * 7, -1.0, 1.0);
        let k = rng.vec(3 * 2 * 3 * 3, -1.0, 1.0);
        let b = rng.vec(3, -1.0, 1.0);
        let side = (7 - 3) / stride + 1;
        let up = rng.vec(3 * side * side, -1.0, 1.0);
        let g = conv2d_backward(
            &t(&[2, 7, 7], x.clone()),
            &t(&[3, 2, 3, 3], k.clone()),
            stride,
            &t(&[3, side, side], up.clone()),
            true,
        )
        .unwrap();
        let loss = |x: &[f64], k: &[f64], b: &[f64]| {
            dot(&up, conv2d(&t(&[2, 7, 7], x.to_vec()), &t(&[3, 2, 3, 3], k.to_vec()), b, stride).unwrap().data())
        };
        fd(g.input.unwrap().data(), &|v| loss(v, &k, &b), &x);
        fd(g.weights.data(), &|v| loss(&x, v, &b), &k);
        fd(&g.bias, &|v| loss(&x, &k, v), &b);
    }

    let x = rng.vec(9, -1.0, 1.0);
    let w = rng.vec(5 * 9, -1.0, 1.0);
    let b = rng.vec(5, -1.0, 1.0);
    let up = rng.vec(5, -1.0, 1.0);
    let g = dense_backward(&t(&[9], x.clone()), &t(&[5, 9], w.clone()), &t(&[5], up.clone())).unwrap();
    let loss = |x: &[f64], w: &[f64], b: &[f64]| {
        dot(&up, dense(&t(&[9], x.to_vec()), &t(&[5, 9], w.to_vec()), b).unwrap().data())
    };
    fd(g.input.data(), &|v| loss(v, &w, &b), &x);
    fd(g.weights.data(), &|v| loss(&x, v, &b), &w);
    fd(&g.bias, &|v| loss(&x, &w, v), &b);

    // relu inputs kept off the kink
    let x: Vec<f64> = rng.vec(24, -1.0, 1.0).into_iter().map(|v| if v.abs() < 0.01 { 0.3 } else { v }).collect();
    let up = rng.vec(24, -1.0, 1.0);
    let g = relu_backward(&t(&[24], x.clone()), &t(&[24], up.clone())).unwrap();
    fd(g.data(), &|v| dot(&up, relu(&t(&[24], v.to_vec())).data()), &x);

    let x = rng.vec(2 * 6 * 6, -1.0, 1.0);
    let up = rng.vec(2 * 3 * 3, -1.0, 1.0);
    let (_, arg) = maxpool2d(&t(&[2, 6, 6], x.clone()), 2, 2).unwrap();
    let g = maxpool2d_backward(&[2, 6, 6], &arg, &t(&[2, 3, 3], up.clone())).unwrap();
    fd(g.data(), &|v| dot(&up, maxpool2d(&t(&[2, 6, 6], v.to_vec()), 2, 2).unwrap().0.data()), &x);

    let z = rng.vec(4, -2.0, 2.0);
    let (_, g) = softmax_cross_entropy(&t(&[4], z.clone()), 2).unwrap();
    fd(g.data(), &|v| softmax_cross_entropy(&t(&[4], v.to_vec()), 2).unwrap().0, &z);

    let (uniform, _) = softmax_cross_entropy(&t(&[4], vec![0.0; 4]), 0).unwrap();
    let ce_err = (uniform - 4f64.ln()).abs();

    let mut identity = true;
    for kind in OptimizerKind::ALL {
        let start = rng.vec(8, -2.0, 2.0);
        let mut p = start.clone();
        let mut state = OptimizerState::new(8);
        for _ in 0..3 {
            optimizer_step(&mut state, &mut p, &[0.0; 8], &OptimizerConfig::new(kind, 0.01, 0.0)).unwrap();
        }
        identity &= p == start;
    }
    let pass = worst < 1e-6 && ce_err < 1e-12 && identity;
    outcome(
        pass,
        format!("backward max rel err {worst:.1e}; |CE(uniform) - ln 4| = {ce_err:.1e}; zero-grad steps identity: {identity}"),
    )
}

/// HTK Mel centre frequencies from the textbook formula.
fn reference_centres(n_mels: usize, fmax: f64) -> Vec<f64> {
    let to_mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let to_hz = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let top = to_mel(fmax);
    (1..=n_mels).map(|i| to_hz(top * i as f64 / (n_mels + 1) as f64)).collect()
}

fn argmax(v: impl Iterator<Item = f64>) -> usize {
    v.enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, x)| if x > bv { (i, x) } else { (bi, bv) }).0
}

fn feature_pipeline() -> Outcome {
    let n = 66150;
    let mut rng = Lcg(7007);
    let sine = |hz: f64| (0..n).map(|i| (TAU * hz * i as f64 / 22050.0).sin()).collect::<Vec<f64>>();
    let inputs: Vec<Vec<f64>> = vec![
        sine(440.0),
        sine(3000.0).iter().map(|v| v * 0.1).collect(),
        rng.vec(n, -1.0, 1.0),
        (0..n).map(|i| if i == n / 2 { 1.0 } else { 0.0 }).collect(),
        vec![0.0; n],
    ];
    let mut shapes_ok = true;
    for n_mels in [128, 64, 40] {
        let cfg = MelConfig { n_mels, ..MelConfig::default() };
        for x in &inputs {
            let f = extract(&AudioClip::new(22050, x.clone()).unwrap(), &cfg).unwrap();
            shapes_ok &= f.shape() == [n_mels, 126];
        }
    }

    let cfg = MelConfig::default();
    let floor = cfg.log_floor.log10();
    let silence = extract(&AudioClip::new(22050, vec![0.0; n]).unwrap(), &cfg).unwrap();
    let silent = silence.data().iter().all(|v| *v == floor);

    let centres = reference_centres(cfg.n_mels, 11025.0);
    let want = argmax(centres.iter().map(|c| -(c - 440.0).abs()));
    let tone = extract(&AudioClip::new(22050, sine(440.0)).unwrap(), &cfg).unwrap();
    let frames = tone.shape()[1];
    let peaked = (0..frames).filter(|f| argmax((0..cfg.n_mels).map(|m| tone.data()[m * frames + f])) == want).count();

    outcome(
        shapes_ok && silent && peaked == frames,
        format!("shapes n_mels x 126: {shapes_ok}; silence at floor {floor}: {silent}; 440 Hz peak at filter {want} in {peaked}/{frames} frames"),
    )
}

fn parameter_reduction() -> Outcome {
    let arch = Architecture::default();
    let input = [1, 128, 126];
    let classical = build_classical(&HyperParams { quantum: None, ..HyperParams::default() }, &arch, &input, 4)
        .unwrap()
        .count_params();
    let mut ratios = Vec::new();
    for embedding in [EmbeddingKind::Angle { axis: Axis::X }, EmbeddingKind::Amplitude, EmbeddingKind::iqp()] {
        for measurement in [MeasurementKind::PauliZ, MeasurementKind::PauliX, MeasurementKind::ZPlusPauliZ] {
            let q = QuantumLayerConfig {
                n_qubits: 8,
                embedding,
                circuit: CircuitKind::strongly_entangling(2),
                measurement,
            };
            let hybrid =
                build_hybrid(&HyperParams { quantum: Some(q), ..HyperParams::default() }, &arch, &input, 4).unwrap();
            ratios.push((embedding.name(), measurement.name(), hybrid.count_params() as f64 / classical as f64));
        }
    }
    let worst = ratios.iter().map(|r| r.2).fold(0.0, f64::max);
    let per_embedding: Vec<String> = ratios.iter().step_by(3).map(|(e, _, r)| format!("{e} {r:.4}")).collect();
    outcome(worst <= 0.55, format!("classical {classical} params; ratios {}; max {worst:.4}", per_embedding.join(", ")))
}

fn corpus(dir: &Path, n_classes: usize) -> Datasets {
    let cfg = SynthConfig { n_per_class: 100, n_classes, seed: 7, snr_db: 20.0, ..SynthConfig::default() };
    let manifest = generate_synthetic(&cfg, &dir.join(format!("synth{n_classes}"))).unwrap();
    load_datasets(&RunConfig::default(), &manifest).unwrap()
}

fn hybrid_hp() -> HyperParams {
    let q = QuantumLayerConfig {
        n_qubits: 8,
        embedding: EmbeddingKind::Angle { axis: Axis::X },
        circuit: CircuitKind::strongly_entangling(2),
        measurement: MeasurementKind::PauliZ,
    };
    HyperParams { quantum: Some(q), seed: 7, ..HyperParams::default() }
}

fn classical_hp() -> HyperParams {
    HyperParams { quantum: None, seed: 7, ..HyperParams::default() }
}

/// Trains until val UAR reaches `target` or `epochs` run out.
/// Returns (epochs run, last val UAR).
fn train_to(hp: &HyperParams, data: &Datasets, target: f64, epochs: usize) -> (usize, f64) {
    let hp = HyperParams { epochs, ..*hp };
    let mut model = build_model(&hp, &Architecture::default(), &data.input_shape().unwrap(), data.n_classes).unwrap();
    let history = train_model_with(&mut model, &data.train, &data.val, &hp, |r| {
        if r.val_uar.is_some_and(|u| u >= target) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .unwrap();
    (history.epochs.len(), history.final_val_uar().unwrap())
}

type LearningRuns = Vec<(&'static str, usize, usize, f64)>;

fn learning_runs(dir: &Path) -> LearningRuns {
    let mut runs = Vec::new();
    for (n_classes, target, epochs) in [(2, 0.90, 30), (4, 0.70, 50)] {
        let data = corpus(dir, n_classes);
        for (name, hp) in [("hybrid", hybrid_hp()), ("classical", classical_hp())] {
            let (ran, uar) = train_to(&hp, &data, target, epochs);
            runs.push((name, n_classes, ran, uar));
        }
    }
    runs
}

fn end_to_end_learning(dir: &Path) -> (Outcome, LearningRuns) {
    let start = Instant::now();
    let runs = learning_runs(dir);
    let elapsed = start.elapsed();
    let reached = runs.iter().all(|(_, k, _, uar)| *uar >= if *k == 2 { 0.90 } else { 0.70 });
    let summary: Vec<String> =
        runs.iter().map(|(m, k, e, u)| format!("{k}-class {m} UAR {u:.3} after {e} epoch(s)")).collect();
    let out =
        outcome(reached && within(elapsed, 900), format!("{}; {:.1}s", summary.join(", "), elapsed.as_secs_f64()));
    (out, runs)
}

fn ranking(results: &[GridResult]) -> Vec<(usize, Option<u64>)> {
    results.iter().map(|r| (r.point.index, r.val_uar.map(f64::to_bits))).collect()
}

fn determinism(dir: &Path, first: &LearningRuns) -> Outcome {
    let again = learning_runs(dir);
    let bit_identical = first.len() == again.len()
        && first
            .iter()
            .zip(&again)
            .all(|(a, b)| a.0 == b.0 && a.1 == b.1 && a.2 == b.2 && a.3.to_bits() == b.3.to_bits());

    let cfg = SynthConfig { n_per_class: 20, n_classes: 2, seed: 7, snr_db: 20.0, ..SynthConfig::default() };
    let manifest = generate_synthetic(&cfg, &dir.join("grid")).unwrap();
    let data = load_datasets(&RunConfig::default(), &manifest).unwrap();
    let base = hybrid_hp();
    let arch = Architecture::default();
    let ctx = GridContext { base: &base, arch: &arch, budget: 1, n_classes: 2, train: &data.train, val: &data.val };
    let space = GridSpace {
        learning_rates: vec![0.001, 0.0001],
        optimizers: vec![OptimizerKind::Adam, OptimizerKind::Sgd],
        weight_decays: vec![0.0],
        embeddings: vec![EmbeddingKind::Angle { axis: Axis::X }],
        circuits: vec![CircuitKind::strongly_entangling(2)],
        measurements: vec![MeasurementKind::PauliZ],
    };
    let rankings: Vec<_> = [1, 2, 1, 4].iter().map(|w| ranking(&run_grid(&space, &ctx, *w).unwrap())).collect();
    let grid_same = rankings.windows(2).all(|w| w[0] == w[1]);
    let order: Vec<usize> = rankings[0].iter().map(|r| r.0).collect();
    outcome(
        bit_identical && grid_same,
        format!("rerun bit-identical: {bit_identical}; 2x2 grid ranking {order:?} identical over workers 1/2/1/4: {grid_same}"),
    )
}

fn grid_conformance() -> Outcome {
    let space = GridSpace::default();
    let lrs = [0.001, 0.0001, 0.00001];
    let wds = [0.0, 0.01, 0.001];
    let embs = [EmbeddingKind::Angle { axis: Axis::X }, EmbeddingKind::Amplitude, EmbeddingKind::Iqp { repeats: 1 }];
    let circs = [CircuitKind::random_layers(2), CircuitKind::strongly_entangling(2)];
    let meas =
        [MeasurementKind::PauliZ, MeasurementKind::PauliX, MeasurementKind::ZPlusPauliZ, MeasurementKind::Probability];
    let mut expected = Vec::new();
    for lr in lrs {
        for opt in OptimizerKind::ALL {
            for wd in wds {
                for e in embs {
                    for c in circs {
                        for m in meas {
                            expected.push((lr, opt, wd, e, c, m));
                        }
                    }
                }
            }
        }
    }
    let got: Vec<_> = space
        .points()
        .map(|p| (p.learning_rate, p.optimizer, p.weight_decay, p.embedding, p.circuit, p.measurement))
        .collect();
    let indices_ok = space.points().enumerate().all(|(i, p)| p.index == i);
    let first = got.first().copied();
    let last = got.last().copied();
    let pass = space.len() == 1080 && got.len() == 1080 && got == expected && indices_ok;
    outcome(
        pass,
        format!("{} points in documented order: {}; first {first:?}; last {last:?}", got.len(), got == expected),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, o: Outcome| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {name}: {verdict}  {}", o.detail);
        failed += usize::from(!o.pass);
    };
    report(1, "quantum core", quantum_core());
    report(2, "normalization", normalization());
    report(3, "born rule", born_rule());
    report(4, "gradient fidelity", gradient_fidelity());
    report(5, "entanglement", entanglement());
    report(6, "classical nn", classical_nn());
    report(7, "feature pipeline", feature_pipeline());
    report(8, "parameter reduction", parameter_reduction());
    let (learning, runs) = end_to_end_learning(dir.path());
    report(9, "end-to-end learning", learning);
    report(10, "determinism", determinism(dir.path(), &runs));
    report(11, "grid space", grid_conformance());
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
