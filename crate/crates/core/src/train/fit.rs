use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::model::{HyperParams, Model};
use crate::data::Sample;
use crate::nn::{optimizer_step, OptimizerState};
use crate::rng::{SeededRng, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean cross-entropy over the epoch's training examples.
    pub train_loss: f64,
    /// `None` when no validation set was given.
    pub val_uar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct History {
    pub epochs: Vec<EpochRecord>,
}

impl History {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    pub fn final_val_uar(&self) -> Option<f64> {
        self.last().and_then(|r| r.val_uar)
    }
}

/// [`train_model_with`] without an observer.
pub fn train_model(model: &mut Model, train: &[Sample], val: &[Sample], hp: &HyperParams) -> Result<History> {
    train_model_with(model, train, val, hp, |_| ControlFlow::Continue(()))
}

/// Mini-batch training for `hp.epochs` epochs.
///
/// Each epoch visits the training set in the order given by a shuffle from
/// the `Shuffle` stream (sub-stream = epoch index). Per-example gradients
/// are summed in visiting order and divided by the batch length before one
/// optimizer step per parameter array. `observer` sees every finished epoch
/// and may stop training early.
pub fn train_model_with(
    model: &mut Model,
    train: &[Sample],
    val: &[Sample],
    hp: &HyperParams,
    mut observer: impl FnMut(&EpochRecord) -> ControlFlow<()>,
) -> Result<History> {
    hp.validate()?;
    if train.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    let opt = hp.optimizer_config();
    let mut states: Vec<OptimizerState> = model.param_arrays().iter().map(|a| OptimizerState::new(a.len())).collect();
    let mut history = History::default();
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 0..hp.epochs {
        order.sort_unstable();
        SeededRng::new(hp.seed, Stream::Shuffle, epoch as u32).shuffle(&mut order);
        let mut total_loss = 0.0;
        for (batch_idx, batch) in order.chunks(hp.batch_size).enumerate() {
            let mut acc: Vec<Vec<f64>> = model.param_arrays().iter().map(|a| vec![0.0; a.len()]).collect();
            for &i in batch {
                let sample = &train[i];
                let (loss, grads) = model.loss_and_grad(&sample.features, sample.label)?;
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch: epoch + 1, batch: batch_idx + 1 });
                }
                total_loss += loss;
                for (a, g) in acc.iter_mut().zip(&grads) {
                    for (x, y) in a.iter_mut().zip(g) {
                        *x += y;
                    }
                }
            }
            let scale = 1.0 / batch.len() as f64;
            for ((params, grad), state) in model.param_arrays_mut().into_iter().zip(&mut acc).zip(&mut states) {
                grad.iter_mut().for_each(|g| *g *= scale);
                if grad.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFiniteLoss { epoch: epoch + 1, batch: batch_idx + 1 });
                }
                optimizer_step(state, params, grad, &opt)?;
            }
        }
        let val_uar = if val.is_empty() { None } else { Some(evaluate(model, val)?.uar) };
        let record = EpochRecord { epoch: epoch + 1, train_loss: total_loss / train.len() as f64, val_uar };
        history.epochs.push(record);
        if observer(&record).is_break() {
            break;
        }
    }
    Ok(history)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub per_class_recall: Vec<f64>,
    pub uar: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub trainable_params: usize,
}

/// Recall per class and their unweighted mean. Every class in
/// `0..n_classes` must occur among `labels`.
pub fn uar_from_predictions(labels: &[usize], predictions: &[usize], n_classes: usize) -> Result<EvalReport> {
    if labels.len() != predictions.len() {
        return Err(Error::Evaluation(format!("{} labels but {} predictions", labels.len(), predictions.len())));
    }
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in labels.iter().zip(predictions) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::Evaluation(format!("class index out of range for {n_classes} classes")));
        }
        confusion[t][p] += 1;
    }
    let mut per_class_recall = Vec::with_capacity(n_classes);
    for (class, row) in confusion.iter().enumerate() {
        let support: usize = row.iter().sum();
        if support == 0 {
            return Err(Error::Evaluation(format!("class {class} has no examples in the evaluation set")));
        }
        per_class_recall.push(row[class] as f64 / support as f64);
    }
    let uar = per_class_recall.iter().sum::<f64>() / n_classes as f64;
    Ok(EvalReport { per_class_recall, uar, confusion, trainable_params: 0 })
}

pub fn evaluate(model: &Model, samples: &[Sample]) -> Result<EvalReport> {
    let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();
    let predictions = samples.iter().map(|s| model.predict(&s.features)).collect::<Result<Vec<_>>>()?;
    let mut report = uar_from_predictions(&labels, &predictions, model.n_classes())?;
    report.trainable_params = model.count_params();
    Ok(report)
}
