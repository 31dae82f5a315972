use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Shape-level description of a classical layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerSpec {
    Conv2d { in_channels: usize, out_channels: usize, kernel: usize, stride: usize },
    Relu,
    MaxPool2d { kernel: usize, stride: usize },
    Flatten,
    Dense { inputs: usize, outputs: usize },
    Softmax,
}

impl LayerSpec {
    pub fn param_count(&self) -> usize {
        match *self {
            LayerSpec::Conv2d { in_channels, out_channels, kernel, .. } => {
                out_channels * in_channels * kernel * kernel + out_channels
            }
            LayerSpec::Dense { inputs, outputs } => inputs * outputs + outputs,
            _ => 0,
        }
    }

    /// Output shape for `input`, or a model error when they do not compose.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        match *self {
            LayerSpec::Conv2d { in_channels, out_channels, kernel, stride } => {
                let [c, h, w] = *input else {
                    return Err(Error::Model(format!("conv2d expects [C, H, W], got {input:?}")));
                };
                if c != in_channels {
                    return Err(Error::Model(format!("conv2d expects {in_channels} channel(s), got {c}")));
                }
                if kernel == 0 || stride == 0 || kernel > h || kernel > w {
                    return Err(Error::Model(format!("conv2d kernel {kernel} / stride {stride} invalid for {h}x{w}")));
                }
                Ok(vec![out_channels, (h - kernel) / stride + 1, (w - kernel) / stride + 1])
            }
            LayerSpec::MaxPool2d { kernel, stride } => {
                let [c, h, w] = *input else {
                    return Err(Error::Model(format!("maxpool2d expects [C, H, W], got {input:?}")));
                };
                if kernel == 0 || stride == 0 || kernel > h || kernel > w {
                    return Err(Error::Model(format!(
                        "maxpool2d window {kernel} / stride {stride} invalid for {h}x{w}"
                    )));
                }
                Ok(vec![c, (h - kernel) / stride + 1, (w - kernel) / stride + 1])
            }
            LayerSpec::Flatten => Ok(vec![input.iter().product()]),
            LayerSpec::Dense { inputs, outputs } => match *input {
                [n] if n == inputs && n > 0 => Ok(vec![outputs]),
                _ => Err(Error::Model(format!("dense expects [{inputs}], got {input:?}"))),
            },
            LayerSpec::Relu | LayerSpec::Softmax => Ok(input.to_vec()),
        }
    }
}
