//! Forward and backward kernels. Images are `[channels, height, width]`,
//! convolution weights `[out, in, kh, kw]`, dense weights `[out, in]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Tensor;
use crate::{Error, Result};

fn image_dims(t: &Tensor, what: &str) -> Result<(usize, usize, usize)> {
    match *t.shape() {
        [c, h, w] => Ok((c, h, w)),
        _ => Err(Error::Model(format!("{what} expects a [C, H, W] tensor, got {:?}", t.shape()))),
    }
}

struct ConvDims {
    c: usize,
    h: usize,
    w: usize,
    o: usize,
    kh: usize,
    kw: usize,
    oh: usize,
    ow: usize,
}

fn conv_dims(input: &Tensor, weights: &Tensor, stride: usize) -> Result<ConvDims> {
    let (c, h, w) = image_dims(input, "conv2d")?;
    let [o, wc, kh, kw] = *weights.shape() else {
        return Err(Error::Model(format!("conv2d weights must be [O, C, KH, KW], got {:?}", weights.shape())));
    };
    if wc != c {
        return Err(Error::Model(format!("conv2d weights take {wc} channel(s), input has {c}")));
    }
    if stride == 0 {
        return Err(Error::Model("conv2d stride must be >= 1".into()));
    }
    if kh == 0 || kw == 0 || kh > h || kw > w {
        return Err(Error::Model(format!("conv2d kernel {kh}x{kw} does not fit a {h}x{w} input")));
    }
    Ok(ConvDims { c, h, w, o, kh, kw, oh: (h - kh) / stride + 1, ow: (w - kw) / stride + 1 })
}

/// Valid (unpadded) cross-correlation plus per-channel bias.
pub fn conv2d(input: &Tensor, weights: &Tensor, bias: &[f64], stride: usize) -> Result<Tensor> {
    let ConvDims { c, h, w, o, kh, kw, oh, ow } = conv_dims(input, weights, stride)?;
    if bias.len() != o {
        return Err(Error::Model(format!("conv2d bias has {} entries, expected {o}", bias.len())));
    }
    let x = input.data();
    let k = weights.data();
    let mut out = vec![0.0; o * oh * ow];
    for (oc, plane) in out.chunks_exact_mut(oh * ow).enumerate() {
        plane.fill(bias[oc]);
        for ic in 0..c {
            let src = &x[ic * h * w..(ic + 1) * h * w];
            for ky in 0..kh {
                for kx in 0..kw {
                    let wv = k[((oc * c + ic) * kh + ky) * kw + kx];
                    for (oy, row) in plane.chunks_exact_mut(ow).enumerate() {
                        let start = (oy * stride + ky) * w + kx;
                        if stride == 1 {
                            for (dst, s) in row.iter_mut().zip(&src[start..start + ow]) {
                                *dst += wv * s;
                            }
                        } else {
                            for (ox, dst) in row.iter_mut().enumerate() {
                                *dst += wv * src[start + ox * stride];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Tensor::from_parts(vec![o, oh, ow], out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conv2dGrads {
    /// `None` when the input gradient was not requested.
    pub input: Option<Tensor>,
    pub weights: Tensor,
    pub bias: Vec<f64>,
}

/// Gradients of [`conv2d`] given the gradient of its output.
pub fn conv2d_backward(
    input: &Tensor,
    weights: &Tensor,
    stride: usize,
    grad_out: &Tensor,
    need_input_grad: bool,
) -> Result<Conv2dGrads> {
    let ConvDims { c, h, w, o, kh, kw, oh, ow } = conv_dims(input, weights, stride)?;
    if grad_out.shape() != [o, oh, ow] {
        return Err(Error::Model(format!(
            "conv2d output gradient has shape {:?}, expected {:?}",
            grad_out.shape(),
            [o, oh, ow]
        )));
    }
    let x = input.data();
    let k = weights.data();
    let g = grad_out.data();
    let mut dk = vec![0.0; k.len()];
    let mut dx = if need_input_grad { vec![0.0; x.len()] } else { Vec::new() };
    let mut db = vec![0.0; o];
    for oc in 0..o {
        let gplane = &g[oc * oh * ow..(oc + 1) * oh * ow];
        db[oc] = gplane.iter().sum();
        for ic in 0..c {
            let src = &x[ic * h * w..(ic + 1) * h * w];
            for ky in 0..kh {
                for kx in 0..kw {
                    let widx = ((oc * c + ic) * kh + ky) * kw + kx;
                    let wv = k[widx];
                    let mut acc = 0.0;
                    for (oy, grow) in gplane.chunks_exact(ow).enumerate() {
                        let start = (oy * stride + ky) * w + kx;
                        if stride == 1 {
                            acc += grow.iter().zip(&src[start..start + ow]).map(|(a, b)| a * b).sum::<f64>();
                            if need_input_grad {
                                let drow = &mut dx[ic * h * w + start..ic * h * w + start + ow];
                                for (d, gv) in drow.iter_mut().zip(grow) {
                                    *d += wv * gv;
                                }
                            }
                        } else {
                            for (ox, gv) in grow.iter().enumerate() {
                                acc += gv * src[start + ox * stride];
                                if need_input_grad {
                                    dx[ic * h * w + start + ox * stride] += wv * gv;
                                }
                            }
                        }
                    }
                    dk[widx] = acc;
                }
            }
        }
    }
    Ok(Conv2dGrads {
        input: need_input_grad.then(|| Tensor::from_parts(input.shape().to_vec(), dx)),
        weights: Tensor::from_parts(weights.shape().to_vec(), dk),
        bias: db,
    })
}

fn dense_dims(input: &Tensor, weights: &Tensor, what: &str) -> Result<(usize, usize)> {
    let [o, i] = *weights.shape() else {
        return Err(Error::Model(format!("{what} weights must be [O, I], got {:?}", weights.shape())));
    };
    if i == 0 || input.len() != i {
        return Err(Error::Model(format!("{what} takes {i} input(s), got {}", input.len())));
    }
    Ok((o, i))
}

/// `W x + b` on a flat input.
pub fn dense(input: &Tensor, weights: &Tensor, bias: &[f64]) -> Result<Tensor> {
    let (o, i) = dense_dims(input, weights, "dense")?;
    if bias.len() != o {
        return Err(Error::Model(format!("dense bias has {} entries, expected {o}", bias.len())));
    }
    let x = input.data();
    let out = weights
        .data()
        .chunks_exact(i)
        .zip(bias)
        .map(|(row, b)| b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
        .collect();
    Ok(Tensor::vector(out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads {
    pub input: Tensor,
    pub weights: Tensor,
    pub bias: Vec<f64>,
}

pub fn dense_backward(input: &Tensor, weights: &Tensor, grad_out: &Tensor) -> Result<DenseGrads> {
    let (o, i) = dense_dims(input, weights, "dense")?;
    if grad_out.len() != o {
        return Err(Error::Model(format!("dense output gradient has {} entries, expected {o}", grad_out.len())));
    }
    let x = input.data();
    let g = grad_out.data();
    let mut dw = vec![0.0; o * i];
    let mut dx = vec![0.0; i];
    for ((row, drow), gv) in weights.data().chunks_exact(i).zip(dw.chunks_exact_mut(i)).zip(g) {
        for ((d, xv), (dxv, wv)) in drow.iter_mut().zip(x).zip(dx.iter_mut().zip(row)) {
            *d = gv * xv;
            *dxv += gv * wv;
        }
    }
    Ok(DenseGrads {
        input: Tensor::from_parts(input.shape().to_vec(), dx),
        weights: Tensor::from_parts(weights.shape().to_vec(), dw),
        bias: g.to_vec(),
    })
}

pub fn relu(input: &Tensor) -> Tensor {
    Tensor::from_parts(input.shape().to_vec(), input.data().iter().map(|v| v.max(0.0)).collect())
}

/// Passes gradient where the input was strictly positive.
pub fn relu_backward(input: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
    if input.shape() != grad_out.shape() {
        return Err(Error::Model("relu gradient shape mismatch".into()));
    }
    let data = input.data().iter().zip(grad_out.data()).map(|(x, g)| if *x > 0.0 { *g } else { 0.0 }).collect();
    Ok(Tensor::from_parts(input.shape().to_vec(), data))
}

fn pool_dims(input: &Tensor, kernel: usize, stride: usize) -> Result<(usize, usize, usize, usize, usize)> {
    let (c, h, w) = image_dims(input, "maxpool2d")?;
    if kernel == 0 || stride == 0 || kernel > h || kernel > w {
        return Err(Error::Model(format!("maxpool2d window {kernel} / stride {stride} invalid for {h}x{w}")));
    }
    Ok((c, h, w, (h - kernel) / stride + 1, (w - kernel) / stride + 1))
}

/// Max pooling; also returns the flat input index chosen for every output.
/// Ties go to the lowest index.
pub fn maxpool2d(input: &Tensor, kernel: usize, stride: usize) -> Result<(Tensor, Vec<usize>)> {
    let (c, h, w, oh, ow) = pool_dims(input, kernel, stride)?;
    let x = input.data();
    let mut out = Vec::with_capacity(c * oh * ow);
    let mut argmax = Vec::with_capacity(c * oh * ow);
    for ch in 0..c {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = usize::MAX;
                for ky in 0..kernel {
                    for kx in 0..kernel {
                        let idx = ch * h * w + (oy * stride + ky) * w + ox * stride + kx;
                        if best == usize::MAX || x[idx] > x[best] {
                            best = idx;
                        }
                    }
                }
                out.push(x[best]);
                argmax.push(best);
            }
        }
    }
    Ok((Tensor::from_parts(vec![c, oh, ow], out), argmax))
}

/// Routes each output gradient to the input position recorded in `argmax`.
pub fn maxpool2d_backward(input_shape: &[usize], argmax: &[usize], grad_out: &Tensor) -> Result<Tensor> {
    if argmax.len() != grad_out.len() {
        return Err(Error::Model("maxpool2d gradient shape mismatch".into()));
    }
    let mut dx = vec![0.0; input_shape.iter().product()];
    for (idx, g) in argmax.iter().zip(grad_out.data()) {
        dx[*idx] += g;
    }
    Ok(Tensor::from_parts(input_shape.to_vec(), dx))
}

pub fn flatten(input: &Tensor) -> Tensor {
    Tensor::vector(input.data().to_vec())
}
