//! Model assembly, training, UAR evaluation and grid search.
//!
//! Both model families share the CNN front-end
//!
//! ```text
//! Conv2d(1 -> 16, 5x5) -> ReLU -> MaxPool(2x2) -> Conv2d(16 -> 32, 3x3) -> ReLU -> MaxPool(2x2) -> Flatten
//! ```
//!
//! and differ after it:
//!
//! * hybrid, angle/IQP embedding: `Dense(D -> n) -> pi * sigmoid -> quantum -> Dense(-> k) -> Softmax`
//! * hybrid, amplitude embedding: `Dense(D -> 128) -> zero pad to 2^n -> quantum -> Dense(-> k) -> Softmax`
//! * classical: `Dense(D -> 256) -> ReLU -> Dense(256 -> k) -> Softmax`
//!
//! Layer `i` is initialised from sub-stream `i` of the `Init` stream, so a
//! hybrid model and a classical one built with the same seed start from the
//! same CNN weights.

mod fit;
mod grid;
mod model;

pub use fit::{evaluate, train_model, train_model_with, uar_from_predictions, EpochRecord, EvalReport, History};
pub use grid::{
    evaluate_point, grid_search, rank, GridContext, GridPoint, GridResult, GridSpace, PointStatus, DEFAULT_GRID_BUDGET,
};
pub use model::{
    build_classical, build_hybrid, build_model, classical_layers, count_layer_params, count_params, hybrid_layers,
    model_input_shape, Architecture, HyperParams, LayerDef, Model, DEFAULT_BATCH_SIZE, DEFAULT_EPOCHS,
};
