//! Optimizers from the grid-search space.
//!
//! Weight decay is classic L2: the update uses `g + weight_decay * p` in
//! place of `g`. Default constants:
//!
//! | kind     | constants                        |
//! |----------|----------------------------------|
//! | Adam     | beta1 0.9, beta2 0.999, eps 1e-8 |
//! | RMSProp  | rho 0.99, eps 1e-8               |
//! | AdaDelta | rho 0.9, eps 1e-6                |
//! | AdaGrad  | eps 1e-10                        |
//! | SGD      | momentum 0                       |
//!
//! AdaDelta scales its step by the learning rate, so a zero rate freezes
//! the parameters for every kind.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OptimizerKind {
    #[default]
    Adam,
    Sgd,
    RmsProp,
    AdaDelta,
    AdaGrad,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 5] = [
        OptimizerKind::Adam,
        OptimizerKind::Sgd,
        OptimizerKind::RmsProp,
        OptimizerKind::AdaDelta,
        OptimizerKind::AdaGrad,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Adam => "adam",
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::RmsProp => "rms_prop",
            OptimizerKind::AdaDelta => "ada_delta",
            OptimizerKind::AdaGrad => "ada_grad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub rho: f64,
    pub momentum: f64,
}

impl OptimizerConfig {
    /// Config with the documented defaults for `kind`.
    pub fn new(kind: OptimizerKind, learning_rate: f64, weight_decay: f64) -> Self {
        let (eps, rho) = match kind {
            OptimizerKind::Adam => (1e-8, 0.0),
            OptimizerKind::Sgd => (0.0, 0.0),
            OptimizerKind::RmsProp => (1e-8, 0.99),
            OptimizerKind::AdaDelta => (1e-6, 0.9),
            OptimizerKind::AdaGrad => (1e-10, 0.0),
        };
        OptimizerConfig { kind, learning_rate, weight_decay, beta1: 0.9, beta2: 0.999, eps, rho, momentum: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..1.0).contains(&v);
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!("learning_rate must be finite and >= 0, got {}", self.learning_rate)));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::Config(format!("weight_decay must be finite and >= 0, got {}", self.weight_decay)));
        }
        if !(unit(self.beta1) && unit(self.beta2) && unit(self.rho) && unit(self.momentum)) {
            return Err(Error::Config("beta1, beta2, rho and momentum must lie in [0, 1)".into()));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::Config("eps must be finite and >= 0".into()));
        }
        let needs_eps = !matches!(self.kind, OptimizerKind::Sgd);
        if needs_eps && self.eps == 0.0 {
            return Err(Error::Config(format!("{} needs eps > 0", self.kind.name())));
        }
        Ok(())
    }
}

/// Per-parameter-array accumulators. `first` and `second` hold, by kind:
/// Adam `(m, v)`, SGD `(velocity, -)`, RMSProp `(-, E[g^2])`,
/// AdaDelta `(E[dx^2], E[g^2])`, AdaGrad `(-, sum g^2)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimizerState {
    pub step: u64,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl OptimizerState {
    pub fn new(len: usize) -> Self {
        OptimizerState { step: 0, first: vec![0.0; len], second: vec![0.0; len] }
    }
}

pub fn optimizer_step(
    state: &mut OptimizerState,
    params: &mut [f64],
    grads: &[f64],
    config: &OptimizerConfig,
) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::Model(format!("{} parameters but {} gradients", params.len(), grads.len())));
    }
    if state.first.len() != params.len() || state.second.len() != params.len() {
        *state = OptimizerState::new(params.len());
    }
    state.step += 1;
    let lr = config.learning_rate;
    let wd = config.weight_decay;
    let eps = config.eps;
    let OptimizerState { step, first, second } = state;
    let iter = params.iter_mut().zip(grads).zip(first.iter_mut().zip(second.iter_mut()));
    match config.kind {
        OptimizerKind::Sgd => {
            for ((p, g), (vel, _)) in iter {
                let g = g + wd * *p;
                if config.momentum > 0.0 {
                    *vel = config.momentum * *vel + g;
                    *p -= lr * *vel;
                } else {
                    *p -= lr * g;
                }
            }
        }
        OptimizerKind::Adam => {
            let (b1, b2) = (config.beta1, config.beta2);
            let c1 = 1.0 - libm::pow(b1, *step as f64);
            let c2 = 1.0 - libm::pow(b2, *step as f64);
            for ((p, g), (m, v)) in iter {
                let g = g + wd * *p;
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *p -= lr * (*m / c1) / (libm::sqrt(*v / c2) + eps);
            }
        }
        OptimizerKind::RmsProp => {
            let rho = config.rho;
            for ((p, g), (_, sq)) in iter {
                let g = g + wd * *p;
                *sq = rho * *sq + (1.0 - rho) * g * g;
                *p -= lr * g / (libm::sqrt(*sq) + eps);
            }
        }
        OptimizerKind::AdaDelta => {
            let rho = config.rho;
            for ((p, g), (dx_sq, g_sq)) in iter {
                let g = g + wd * *p;
                *g_sq = rho * *g_sq + (1.0 - rho) * g * g;
                let delta = libm::sqrt(*dx_sq + eps) / libm::sqrt(*g_sq + eps) * g;
                *dx_sq = rho * *dx_sq + (1.0 - rho) * delta * delta;
                *p -= lr * delta;
            }
        }
        OptimizerKind::AdaGrad => {
            for ((p, g), (_, sum)) in iter {
                let g = g + wd * *p;
                *sum += g * g;
                *p -= lr * g / (libm::sqrt(*sum) + eps);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_example() {
        let cfg = OptimizerConfig::new(OptimizerKind::Sgd, 0.1, 0.0);
        let mut p = [1.0];
        optimizer_step(&mut OptimizerState::new(1), &mut p, &[0.5], &cfg).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-15);
    }

    #[test]
    fn weight_decay_adds_l2_term() {
        let cfg = OptimizerConfig::new(OptimizerKind::Sgd, 0.1, 0.01);
        let mut p = [2.0];
        optimizer_step(&mut OptimizerState::new(1), &mut p, &[0.0], &cfg).unwrap();
        assert!((p[0] - (2.0 - 0.1 * 0.02)).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_identity() {
        for kind in OptimizerKind::ALL {
            let cfg = OptimizerConfig::new(kind, 0.01, 0.0);
            let mut state = OptimizerState::new(3);
            let mut p = [0.3, -1.2, 4.0];
            for _ in 0..3 {
                optimizer_step(&mut state, &mut p, &[0.0; 3], &cfg).unwrap();
            }
            assert_eq!(p, [0.3, -1.2, 4.0], "{kind:?}");
        }
    }

    #[test]
    fn first_adam_step_closed_form() {
        // m1 = 0.1 g, v1 = 0.001 g^2; bias correction gives m = g, v = g^2,
        // so the step is lr * g / (|g| + eps).
        let cfg = OptimizerConfig::new(OptimizerKind::Adam, 0.001, 0.0);
        for g in [0.5, -3.0, 1e-6] {
            let mut p = [1.0];
            optimizer_step(&mut OptimizerState::new(1), &mut p, &[g], &cfg).unwrap();
            let expect = 1.0 - 0.001 * g / (f64::abs(g) + 1e-8);
            assert!((p[0] - expect).abs() < 1e-15, "g={g}: {} vs {expect}", p[0]);
        }
    }

    #[test]
    fn length_mismatch() {
        let cfg = OptimizerConfig::new(OptimizerKind::Adam, 0.001, 0.0);
        assert!(optimizer_step(&mut OptimizerState::new(2), &mut [0.0; 2], &[0.0], &cfg).is_err());
    }
}
