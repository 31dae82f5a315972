//! Hybrid classical-quantum speech emotion recognition.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every piece of the
//! pipeline that is pure computation:
//!
//! * [`qstate`], [`embed`], [`qcircuit`], [`measure`], [`qgrad`]: a dense
//!   statevector simulator and the differentiable quantum layer built on it.
//! * [`nn`]: tensors, CNN building blocks, softmax cross-entropy and the five
//!   optimizers used by the grid search.
//! * [`features`]: resampling, length fixing and log-Mel spectrograms.
//! * [`data`]: label mapping, splits and the synthetic corpus generator.
//! * [`train`]: hybrid/classical model assembly, training, UAR evaluation and
//!   grid enumeration.
//!
//! File formats, the CLI and anything touching the filesystem live in the
//! companion `qser` crate.
//!
//! Basis ordering used everywhere: qubit 0 is the most significant bit of a
//! basis index, `b = sum_i q_i * 2^(n-1-i)`.

#![no_std]

extern crate alloc;

pub mod data;
pub mod embed;
mod error;
pub mod features;
pub mod measure;
pub mod nn;
pub mod qcircuit;
pub mod qgrad;
pub mod qstate;
pub mod rng;
pub mod train;

pub use error::{Error, Result};
