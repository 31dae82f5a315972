use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::fit::train_model;
use super::model::{build_model, model_input_shape, Architecture, HyperParams};
use crate::data::Sample;
use crate::embed::EmbeddingKind;
use crate::measure::MeasurementKind;
use crate::nn::OptimizerKind;
use crate::qcircuit::CircuitKind;
use crate::qgrad::QuantumLayerConfig;
use crate::{Error, Result};

/// Epochs each grid point is trained for unless configured otherwise.
pub const DEFAULT_GRID_BUDGET: usize = 10;

/// Axes of the search. Points are enumerated lexicographically in field
/// order: learning rate outermost, measurement innermost.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GridSpace {
    pub learning_rates: Vec<f64>,
    pub optimizers: Vec<OptimizerKind>,
    pub weight_decays: Vec<f64>,
    pub embeddings: Vec<EmbeddingKind>,
    pub circuits: Vec<CircuitKind>,
    pub measurements: Vec<MeasurementKind>,
}

impl Default for GridSpace {
    /// The full 3 x 5 x 3 x 3 x 2 x 4 = 1080-point space.
    fn default() -> Self {
        GridSpace {
            learning_rates: alloc::vec![0.001, 0.0001, 0.00001],
            optimizers: OptimizerKind::ALL.to_vec(),
            weight_decays: alloc::vec![0.0, 0.01, 0.001],
            embeddings: alloc::vec![EmbeddingKind::default(), EmbeddingKind::Amplitude, EmbeddingKind::iqp()],
            circuits: alloc::vec![CircuitKind::random_layers(2), CircuitKind::strongly_entangling(2)],
            measurements: alloc::vec![
                MeasurementKind::PauliZ,
                MeasurementKind::PauliX,
                MeasurementKind::ZPlusPauliZ,
                MeasurementKind::Probability,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub weight_decay: f64,
    pub embedding: EmbeddingKind,
    pub circuit: CircuitKind,
    pub measurement: MeasurementKind,
}

impl GridPoint {
    /// `base` with this point's values substituted. The qubit count comes
    /// from `base.quantum` (default 8 when absent).
    pub fn hyper_params(&self, base: &HyperParams) -> HyperParams {
        let n_qubits = base.quantum.map(|q| q.n_qubits).unwrap_or(crate::qgrad::DEFAULT_QUBITS);
        HyperParams {
            learning_rate: self.learning_rate,
            optimizer: self.optimizer,
            weight_decay: self.weight_decay,
            quantum: Some(QuantumLayerConfig {
                n_qubits,
                embedding: self.embedding,
                circuit: self.circuit,
                measurement: self.measurement,
            }),
            ..*base
        }
    }
}

impl GridSpace {
    fn dims(&self) -> [usize; 6] {
        [
            self.learning_rates.len(),
            self.optimizers.len(),
            self.weight_decays.len(),
            self.embeddings.len(),
            self.circuits.len(),
            self.measurements.len(),
        ]
    }

    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in enumeration order.
    pub fn point(&self, index: usize) -> Option<GridPoint> {
        if index >= self.len() {
            return None;
        }
        let dims = self.dims();
        let mut digits = [0usize; 6];
        let mut rest = index;
        for (d, n) in digits.iter_mut().zip(dims).rev() {
            *d = rest % n;
            rest /= n;
        }
        Some(GridPoint {
            index,
            learning_rate: self.learning_rates[digits[0]],
            optimizer: self.optimizers[digits[1]],
            weight_decay: self.weight_decays[digits[2]],
            embedding: self.embeddings[digits[3]],
            circuit: self.circuits[digits[4]],
            measurement: self.measurements[digits[5]],
        })
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.len()).filter_map(|i| self.point(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub point: GridPoint,
    /// UAR on the validation set after the last epoch; `None` if the point
    /// failed.
    pub val_uar: Option<f64>,
    /// Trainable parameters; 0 if the model could not be built.
    pub params: usize,
    pub status: PointStatus,
}

/// Datasets and fixed settings shared by every point.
#[derive(Debug, Clone, Copy)]
pub struct GridContext<'a> {
    pub base: &'a HyperParams,
    pub arch: &'a Architecture,
    /// Epochs per point.
    pub budget: usize,
    pub n_classes: usize,
    pub train: &'a [Sample],
    pub val: &'a [Sample],
}

/// Builds and trains one point. Failures are captured in the result.
pub fn evaluate_point(point: &GridPoint, ctx: &GridContext<'_>) -> GridResult {
    let hp = HyperParams { epochs: ctx.budget, ..point.hyper_params(ctx.base) };
    let input_shape = match ctx.train.first() {
        Some(s) => model_input_shape(s.features.shape()),
        None => return failed(point, 0, Error::Data("training set is empty".into())),
    };
    let mut model = match build_model(&hp, ctx.arch, &input_shape, ctx.n_classes) {
        Ok(m) => m,
        Err(e) => return failed(point, 0, e),
    };
    let params = model.count_params();
    match train_model(&mut model, ctx.train, ctx.val, &hp) {
        Ok(history) => match history.final_val_uar() {
            Some(uar) => GridResult { point: *point, val_uar: Some(uar), params, status: PointStatus::Ok },
            None => failed(point, params, Error::Data("no validation UAR was recorded".into())),
        },
        Err(e) => failed(point, params, e),
    }
}

fn failed(point: &GridPoint, params: usize, err: Error) -> GridResult {
    GridResult { point: *point, val_uar: None, params, status: PointStatus::Failed(err.to_string()) }
}

/// Best first: higher val UAR, then fewer parameters, then earlier point.
/// Failed points go last in enumeration order.
pub fn rank(results: &mut [GridResult]) {
    results.sort_by(|a, b| match (a.val_uar, b.val_uar) {
        (Some(x), Some(y)) => y
            .partial_cmp(&x)
            .unwrap_or(Ordering::Equal)
            .then(a.params.cmp(&b.params))
            .then(a.point.index.cmp(&b.point.index)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.point.index.cmp(&b.point.index),
    });
}

/// Sequential exhaustive search, ranked.
pub fn grid_search(space: &GridSpace, ctx: &GridContext<'_>) -> Result<Vec<GridResult>> {
    if space.is_empty() {
        return Err(Error::Config("grid search space is empty".into()));
    }
    let mut results: Vec<GridResult> = space.points().map(|p| evaluate_point(&p, ctx)).collect();
    rank(&mut results);
    Ok(results)
}
