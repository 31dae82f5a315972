//! Minimal classical deep-learning stack: tensors, CNN layers with explicit
//! backward passes, softmax cross-entropy and optimizers.

mod loss;
mod ops;
mod optim;
mod spec;
mod tensor;

pub use loss::{softmax, softmax_cross_entropy};
pub use ops::{
    conv2d, conv2d_backward, dense, dense_backward, flatten, maxpool2d, maxpool2d_backward, relu, relu_backward,
    Conv2dGrads, DenseGrads,
};
pub use optim::{optimizer_step, OptimizerConfig, OptimizerKind, OptimizerState};
pub use spec::LayerSpec;
pub use tensor::Tensor;
