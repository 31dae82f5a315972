//! Filesystem side of `qser-core`: WAV input, `.qft` feature files, model
//! checkpoints, manifests, the JSON run configuration, synthetic corpora on
//! disk and the parallel grid runner. The `qser` binary is a thin layer
//! over [`pipeline`].

pub mod checkpoint;
pub mod config;
pub mod corpus;
mod error;
pub mod grid;
pub mod manifest;
pub mod pipeline;
pub mod qft;
pub mod wav;

pub use error::{Error, Result};
