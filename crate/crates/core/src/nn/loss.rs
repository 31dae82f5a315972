use alloc::format;
use alloc::vec::Vec;

use super::Tensor;
use crate::{Error, Result};

/// Max-subtracted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| libm::exp(z - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Returns `-log p[label]` and its gradient `p - one_hot(label)`.
pub fn softmax_cross_entropy(logits: &Tensor, label: usize) -> Result<(f64, Tensor)> {
    let z = logits.data();
    if label >= z.len() {
        return Err(Error::Data(format!("label {label} out of range for {} classes", z.len())));
    }
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = libm::log(z.iter().map(|v| libm::exp(v - max)).sum::<f64>());
    let loss = log_sum - (z[label] - max);
    let mut grad = softmax(z);
    grad[label] -= 1.0;
    Ok((loss, Tensor::from_parts(logits.shape().to_vec(), grad)))
}
