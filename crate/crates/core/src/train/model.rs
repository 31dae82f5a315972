use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::embed::EmbeddingKind;
use crate::nn::{
    conv2d, conv2d_backward, dense, dense_backward, maxpool2d, maxpool2d_backward, relu, relu_backward, softmax,
    softmax_cross_entropy, LayerSpec, OptimizerConfig, OptimizerKind, Tensor,
};
use crate::qgrad::{QuantumLayer, QuantumLayerConfig};
use crate::rng::{SeededRng, Stream};
use crate::{Error, Result};

pub const DEFAULT_EPOCHS: usize = 30;
pub const DEFAULT_BATCH_SIZE: usize = 16;

/// Training hyperparameters of one run. `quantum: None` selects the
/// classical baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HyperParams {
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub weight_decay: f64,
    pub quantum: Option<QuantumLayerConfig>,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            learning_rate: 0.001,
            optimizer: OptimizerKind::Adam,
            weight_decay: 0.0,
            quantum: Some(QuantumLayerConfig::default()),
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH_SIZE,
            seed: 0,
        }
    }
}

impl HyperParams {
    pub fn optimizer_config(&self) -> OptimizerConfig {
        OptimizerConfig::new(self.optimizer, self.learning_rate, self.weight_decay)
    }

    pub fn validate(&self) -> Result<()> {
        self.optimizer_config().validate()?;
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if let Some(q) = &self.quantum {
            q.embedding.validate()?;
        }
        Ok(())
    }
}

/// Dimensions of the CNN front-end and the adaptor/surrogate widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Architecture {
    pub conv1_channels: usize,
    pub conv1_kernel: usize,
    pub conv2_channels: usize,
    pub conv2_kernel: usize,
    pub pool: usize,
    /// Width of the dense projection in front of an amplitude embedding;
    /// the rest of the `2^n` amplitude inputs are zero-padded.
    pub amplitude_width: usize,
    /// Width of the dense ReLU layer standing in for the quantum block in
    /// the classical baseline.
    pub surrogate_width: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            conv1_channels: 16,
            conv1_kernel: 5,
            conv2_channels: 32,
            conv2_kernel: 3,
            pool: 2,
            amplitude_width: 128,
            surrogate_width: 256,
        }
    }
}

/// One link of a model chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerDef {
    Classical(LayerSpec),
    /// Elementwise `pi * sigmoid(x)`, mapping features onto rotation angles.
    AngleRange,
    /// Appends zeros up to `width` entries.
    ZeroPad {
        width: usize,
    },
    Quantum(QuantumLayerConfig),
}

impl LayerDef {
    pub fn param_count(&self) -> usize {
        match self {
            LayerDef::Classical(spec) => spec.param_count(),
            LayerDef::Quantum(q) => q.circuit.build(q.n_qubits).map(|c| c.n_params()).unwrap_or(0),
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    None,
    Affine { weights: Tensor, bias: Vec<f64> },
    Quantum { layer: QuantumLayer, params: Vec<f64> },
}

/// A shape-checked chain of layers with its parameters. The chain ends in
/// a softmax; [`Model::logits`] stops just before it.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    input_shape: Vec<usize>,
    defs: Vec<LayerDef>,
    shapes: Vec<Vec<usize>>,
    params: Vec<Params>,
}

fn output_shape(def: &LayerDef, input: &[usize]) -> Result<Vec<usize>> {
    let flat = |what: &str| match *input {
        [n] => Ok(n),
        _ => Err(Error::Model(format!("{what} expects a flat input, got {input:?}"))),
    };
    match def {
        LayerDef::Classical(spec) => spec.output_shape(input),
        LayerDef::AngleRange => {
            flat("angle range")?;
            Ok(input.to_vec())
        }
        LayerDef::ZeroPad { width } => {
            let n = flat("zero pad")?;
            if n > *width {
                return Err(Error::Model(format!("cannot zero-pad {n} values down to {width}")));
            }
            Ok(vec![*width])
        }
        LayerDef::Quantum(q) => {
            let n = flat("quantum layer")?;
            if n != q.input_width() {
                return Err(Error::Model(format!(
                    "{} embedding on {} qubits takes {} input(s), got {n}",
                    q.embedding.name(),
                    q.n_qubits,
                    q.input_width()
                )));
            }
            Ok(vec![q.output_width()])
        }
    }
}

/// Per-layer activations kept for the backward pass.
enum Cache {
    None,
    Pool(Vec<usize>),
}

impl Model {
    /// Shape-checks `defs` against `input_shape` and fills parameters from
    /// the `Init` stream of `seed` (sub-stream = layer index). Weights and
    /// biases are uniform in `+/- sqrt(1 / fan_in)`; quantum parameters are
    /// uniform in `[0, 2 pi)`.
    pub fn init(input_shape: &[usize], defs: Vec<LayerDef>, seed: u64) -> Result<Self> {
        let shapes = Self::infer_shapes(input_shape, &defs)?;
        let mut params = Vec::with_capacity(defs.len());
        for (idx, def) in defs.iter().enumerate() {
            let mut rng = SeededRng::new(seed, Stream::Init, idx as u32);
            params.push(match def {
                LayerDef::Classical(spec) => match affine_shape(spec) {
                    Some((shape, fan_in, n_bias)) => {
                        let bound = libm::sqrt(1.0 / fan_in as f64);
                        let n: usize = shape.iter().product();
                        let w = (0..n).map(|_| rng.range(-bound, bound)).collect();
                        let bias = (0..n_bias).map(|_| rng.range(-bound, bound)).collect();
                        Params::Affine { weights: Tensor::from_parts(shape, w), bias }
                    }
                    None => Params::None,
                },
                LayerDef::Quantum(q) => {
                    let layer = QuantumLayer::new(q)?;
                    let params = (0..layer.n_params()).map(|_| rng.range(0.0, TAU)).collect();
                    Params::Quantum { layer, params }
                }
                _ => Params::None,
            });
        }
        Ok(Model { input_shape: input_shape.to_vec(), defs, shapes, params })
    }

    /// Rebuilds a model from its definition and flat parameter arrays, one
    /// per parameterised layer in chain order (weights then bias).
    pub fn from_parts(input_shape: &[usize], defs: Vec<LayerDef>, arrays: Vec<Vec<f64>>) -> Result<Self> {
        let mut model = Self::init(input_shape, defs, 0)?;
        let expected = model.param_arrays().len();
        if arrays.len() != expected {
            return Err(Error::Model(format!("model has {expected} parameter arrays, got {}", arrays.len())));
        }
        for (dst, src) in model.param_arrays_mut().into_iter().zip(arrays) {
            if dst.len() != src.len() {
                return Err(Error::Model(format!("parameter array of {} values, got {}", dst.len(), src.len())));
            }
            if src.iter().any(|v| !v.is_finite()) {
                return Err(Error::Model("non-finite parameter".into()));
            }
            dst.copy_from_slice(&src);
        }
        Ok(model)
    }

    fn infer_shapes(input_shape: &[usize], defs: &[LayerDef]) -> Result<Vec<Vec<usize>>> {
        if !matches!(defs.last(), Some(LayerDef::Classical(LayerSpec::Softmax))) {
            return Err(Error::Model("model must end in a softmax".into()));
        }
        let mut shapes = vec![input_shape.to_vec()];
        for def in defs {
            let next = output_shape(def, shapes.last().unwrap())?;
            shapes.push(next);
        }
        Ok(shapes)
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn layers(&self) -> &[LayerDef] {
        &self.defs
    }

    /// Activation shape after every layer; entry 0 is the input shape.
    pub fn shapes(&self) -> &[Vec<usize>] {
        &self.shapes
    }

    pub fn n_classes(&self) -> usize {
        self.shapes.last().map(|s| s[0]).unwrap_or(0)
    }

    pub fn count_params(&self) -> usize {
        self.param_arrays().iter().map(|a| a.len()).sum()
    }

    /// Trainable parameters per layer index (0 for parameter-free layers).
    pub fn layer_param_counts(&self) -> Vec<usize> {
        self.params
            .iter()
            .map(|p| match p {
                Params::None => 0,
                Params::Affine { weights, bias } => weights.len() + bias.len(),
                Params::Quantum { params, .. } => params.len(),
            })
            .collect()
    }

    /// Flat parameter arrays in chain order: weights and bias for conv and
    /// dense layers, the angle vector for quantum layers.
    pub fn param_arrays(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for p in &self.params {
            match p {
                Params::None => {}
                Params::Affine { weights, bias } => {
                    out.push(weights.data());
                    out.push(bias.as_slice());
                }
                Params::Quantum { params, .. } => out.push(params.as_slice()),
            }
        }
        out
    }

    pub fn param_arrays_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for p in &mut self.params {
            match p {
                Params::None => {}
                Params::Affine { weights, bias } => {
                    out.push(weights.data_mut());
                    out.push(bias.as_mut_slice());
                }
                Params::Quantum { params, .. } => out.push(params.as_mut_slice()),
            }
        }
        out
    }

    /// Accepts the model's input shape, or `[H, W]` for a `[1, H, W]` model.
    fn prepare_input(&self, input: &Tensor) -> Result<Tensor> {
        let shape = input.shape();
        let ok = shape == self.input_shape.as_slice()
            || (self.input_shape.len() == 3 && self.input_shape[0] == 1 && shape == &self.input_shape[1..]);
        if !ok {
            return Err(Error::Model(format!("model expects input {:?}, got {:?}", self.input_shape, input.shape())));
        }
        Ok(Tensor::from_parts(self.input_shape.clone(), input.data().to_vec()))
    }

    fn step(&self, idx: usize, x: &Tensor) -> Result<(Tensor, Cache)> {
        let out = match (&self.defs[idx], &self.params[idx]) {
            (LayerDef::Classical(LayerSpec::Conv2d { stride, .. }), Params::Affine { weights, bias }) => {
                conv2d(x, weights, bias, *stride)?
            }
            (LayerDef::Classical(LayerSpec::Dense { .. }), Params::Affine { weights, bias }) => {
                dense(x, weights, bias)?
            }
            (LayerDef::Classical(LayerSpec::Relu), _) => relu(x),
            (LayerDef::Classical(LayerSpec::MaxPool2d { kernel, stride }), _) => {
                let (out, argmax) = maxpool2d(x, *kernel, *stride)?;
                return Ok((out, Cache::Pool(argmax)));
            }
            (LayerDef::Classical(LayerSpec::Flatten), _) => Tensor::from_parts(vec![x.len()], x.data().to_vec()),
            (LayerDef::Classical(LayerSpec::Softmax), _) => Tensor::vector(softmax(x.data())),
            (LayerDef::AngleRange, _) => {
                Tensor::from_parts(x.shape().to_vec(), x.data().iter().map(|v| PI * sigmoid(*v)).collect())
            }
            (LayerDef::ZeroPad { width }, _) => {
                let mut data = x.data().to_vec();
                data.resize(*width, 0.0);
                Tensor::vector(data)
            }
            (LayerDef::Quantum(_), Params::Quantum { layer, params }) => {
                Tensor::vector(layer.forward(x.data(), params)?)
            }
            _ => return Err(Error::Model(format!("layer {idx} has no parameters of the right kind"))),
        };
        Ok((out, Cache::None))
    }

    /// Pre-softmax scores.
    pub fn logits(&self, input: &Tensor) -> Result<Vec<f64>> {
        let mut x = self.prepare_input(input)?;
        for idx in 0..self.defs.len() - 1 {
            x = self.step(idx, &x)?.0;
        }
        Ok(x.into_data())
    }

    /// Class probabilities.
    pub fn forward(&self, input: &Tensor) -> Result<Vec<f64>> {
        Ok(softmax(&self.logits(input)?))
    }

    /// Index of the largest score; ties go to the lowest class.
    pub fn predict(&self, input: &Tensor) -> Result<usize> {
        let logits = self.logits(input)?;
        let mut best = 0;
        for (i, v) in logits.iter().enumerate() {
            if *v > logits[best] {
                best = i;
            }
        }
        Ok(best)
    }

    /// Cross-entropy loss of one example and its gradient w.r.t. every
    /// parameter array (same order as [`Model::param_arrays`]).
    pub fn loss_and_grad(&self, input: &Tensor, label: usize) -> Result<(f64, Vec<Vec<f64>>)> {
        let n = self.defs.len() - 1;
        let mut acts = Vec::with_capacity(n + 1);
        let mut caches = Vec::with_capacity(n);
        acts.push(self.prepare_input(input)?);
        for idx in 0..n {
            let (out, cache) = self.step(idx, &acts[idx])?;
            acts.push(out);
            caches.push(cache);
        }
        let (loss, mut grad) = softmax_cross_entropy(&acts[n], label)?;

        let mut per_layer: Vec<Vec<Vec<f64>>> = vec![Vec::new(); n];
        // the first trainable layer never needs its input gradient
        let first_param = self.params.iter().position(|p| !matches!(p, Params::None)).unwrap_or(n);
        for idx in (0..n).rev() {
            if idx < first_param {
                break;
            }
            let x = &acts[idx];
            let need_input = idx > first_param;
            grad = match (&self.defs[idx], &self.params[idx]) {
                (LayerDef::Classical(LayerSpec::Conv2d { stride, .. }), Params::Affine { weights, .. }) => {
                    let g = conv2d_backward(x, weights, *stride, &grad, need_input)?;
                    per_layer[idx] = vec![g.weights.into_data(), g.bias];
                    match g.input {
                        Some(t) => t,
                        None => break,
                    }
                }
                (LayerDef::Classical(LayerSpec::Dense { .. }), Params::Affine { weights, .. }) => {
                    let g = dense_backward(x, weights, &grad)?;
                    per_layer[idx] = vec![g.weights.into_data(), g.bias];
                    g.input
                }
                (LayerDef::Classical(LayerSpec::Relu), _) => relu_backward(x, &grad)?,
                (LayerDef::Classical(LayerSpec::MaxPool2d { .. }), _) => {
                    let Cache::Pool(argmax) = &caches[idx] else {
                        return Err(Error::Model("missing pooling cache".into()));
                    };
                    maxpool2d_backward(x.shape(), argmax, &grad)?
                }
                (LayerDef::Classical(LayerSpec::Flatten), _) => {
                    Tensor::from_parts(x.shape().to_vec(), grad.into_data())
                }
                (LayerDef::AngleRange, _) => {
                    let data = x
                        .data()
                        .iter()
                        .zip(grad.data())
                        .map(|(v, g)| {
                            let s = sigmoid(*v);
                            g * PI * s * (1.0 - s)
                        })
                        .collect();
                    Tensor::from_parts(x.shape().to_vec(), data)
                }
                (LayerDef::ZeroPad { .. }, _) => Tensor::vector(grad.data()[..x.len()].to_vec()),
                (LayerDef::Quantum(_), Params::Quantum { layer, params }) => {
                    per_layer[idx] = vec![layer.param_grad(x.data(), params, grad.data())?];
                    if !need_input {
                        break;
                    }
                    Tensor::vector(layer.input_grad(x.data(), params, grad.data())?)
                }
                _ => return Err(Error::Model(format!("layer {idx} cannot be differentiated"))),
            };
        }
        Ok((loss, per_layer.into_iter().flatten().collect()))
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Model input shape for a feature grid: `[H, W]` becomes `[1, H, W]`.
pub fn model_input_shape(features: &[usize]) -> Vec<usize> {
    match *features {
        [h, w] => vec![1, h, w],
        _ => features.to_vec(),
    }
}

/// `(weight shape, fan_in, bias length)` for layers with parameters.
fn affine_shape(spec: &LayerSpec) -> Option<(Vec<usize>, usize, usize)> {
    match *spec {
        LayerSpec::Conv2d { in_channels, out_channels, kernel, .. } => {
            Some((vec![out_channels, in_channels, kernel, kernel], in_channels * kernel * kernel, out_channels))
        }
        LayerSpec::Dense { inputs, outputs } => Some((vec![outputs, inputs], inputs, outputs)),
        _ => None,
    }
}

/// Conv -> ReLU -> pool -> conv -> ReLU -> pool -> flatten, with the
/// flattened width.
fn cnn_prefix(arch: &Architecture, input_shape: &[usize]) -> Result<(Vec<LayerDef>, usize)> {
    let pool = LayerSpec::MaxPool2d { kernel: arch.pool, stride: arch.pool };
    let specs = [
        LayerSpec::Conv2d { in_channels: 1, out_channels: arch.conv1_channels, kernel: arch.conv1_kernel, stride: 1 },
        LayerSpec::Relu,
        pool,
        LayerSpec::Conv2d {
            in_channels: arch.conv1_channels,
            out_channels: arch.conv2_channels,
            kernel: arch.conv2_kernel,
            stride: 1,
        },
        LayerSpec::Relu,
        pool,
        LayerSpec::Flatten,
    ];
    let mut shape = input_shape.to_vec();
    for spec in &specs {
        shape = spec.output_shape(&shape)?;
    }
    Ok((specs.iter().copied().map(LayerDef::Classical).collect(), shape[0]))
}

fn check_classes(n_classes: usize) -> Result<()> {
    if n_classes < 2 {
        return Err(Error::Model(format!("a classifier needs at least 2 classes, got {n_classes}")));
    }
    Ok(())
}

/// Layer chain of the hybrid model: CNN prefix, adaptor, quantum layer,
/// dense classifier, softmax.
pub fn hybrid_layers(
    quantum: &QuantumLayerConfig,
    arch: &Architecture,
    input_shape: &[usize],
    n_classes: usize,
) -> Result<Vec<LayerDef>> {
    check_classes(n_classes)?;
    let (mut defs, flat) = cnn_prefix(arch, input_shape)?;
    let q_in = quantum.input_width();
    match quantum.embedding {
        EmbeddingKind::Amplitude => {
            defs.push(LayerDef::Classical(LayerSpec::Dense { inputs: flat, outputs: arch.amplitude_width.min(q_in) }));
            if arch.amplitude_width < q_in {
                defs.push(LayerDef::ZeroPad { width: q_in });
            }
        }
        _ => {
            defs.push(LayerDef::Classical(LayerSpec::Dense { inputs: flat, outputs: q_in }));
            defs.push(LayerDef::AngleRange);
        }
    }
    defs.push(LayerDef::Quantum(*quantum));
    defs.push(LayerDef::Classical(LayerSpec::Dense { inputs: quantum.output_width(), outputs: n_classes }));
    defs.push(LayerDef::Classical(LayerSpec::Softmax));
    Ok(defs)
}

/// Layer chain of the classical baseline: CNN prefix, dense ReLU surrogate,
/// dense classifier, softmax.
pub fn classical_layers(arch: &Architecture, input_shape: &[usize], n_classes: usize) -> Result<Vec<LayerDef>> {
    check_classes(n_classes)?;
    if arch.surrogate_width == 0 {
        return Err(Error::Model("surrogate width must be >= 1".into()));
    }
    let (mut defs, flat) = cnn_prefix(arch, input_shape)?;
    defs.push(LayerDef::Classical(LayerSpec::Dense { inputs: flat, outputs: arch.surrogate_width }));
    defs.push(LayerDef::Classical(LayerSpec::Relu));
    defs.push(LayerDef::Classical(LayerSpec::Dense { inputs: arch.surrogate_width, outputs: n_classes }));
    defs.push(LayerDef::Classical(LayerSpec::Softmax));
    Ok(defs)
}

pub fn build_hybrid(hp: &HyperParams, arch: &Architecture, input_shape: &[usize], n_classes: usize) -> Result<Model> {
    let quantum =
        hp.quantum.as_ref().ok_or_else(|| Error::Config("hybrid model needs a quantum layer config".into()))?;
    Model::init(input_shape, hybrid_layers(quantum, arch, input_shape, n_classes)?, hp.seed)
}

pub fn build_classical(
    hp: &HyperParams,
    arch: &Architecture,
    input_shape: &[usize],
    n_classes: usize,
) -> Result<Model> {
    if hp.quantum.is_some() {
        return Err(Error::Config("classical baseline takes no quantum layer config".into()));
    }
    Model::init(input_shape, classical_layers(arch, input_shape, n_classes)?, hp.seed)
}

/// Hybrid when `hp.quantum` is set, classical otherwise.
pub fn build_model(hp: &HyperParams, arch: &Architecture, input_shape: &[usize], n_classes: usize) -> Result<Model> {
    match hp.quantum {
        Some(_) => build_hybrid(hp, arch, input_shape, n_classes),
        None => build_classical(hp, arch, input_shape, n_classes),
    }
}

pub fn count_params(model: &Model) -> usize {
    model.count_params()
}

/// Parameter count of a layer chain without building it.
pub fn count_layer_params(defs: &[LayerDef]) -> usize {
    defs.iter().map(LayerDef::param_count).sum()
}
