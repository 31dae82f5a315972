//! Binary model checkpoints. Layout in `docs/formats.md`.

use std::path::Path;

use qser_core::embed::{Axis, EmbeddingKind};
use qser_core::measure::MeasurementKind;
use qser_core::nn::LayerSpec;
use qser_core::qcircuit::CircuitKind;
use qser_core::qgrad::QuantumLayerConfig;
use qser_core::train::{LayerDef, Model};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"QSER";
pub const VERSION: u32 = 1;

const MEASUREMENTS: [MeasurementKind; 5] = [
    MeasurementKind::PauliZ,
    MeasurementKind::PauliX,
    MeasurementKind::ZProb,
    MeasurementKind::ZPlusPauliZ,
    MeasurementKind::Probability,
];
const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
}

fn write_quantum(w: &mut Writer, q: &QuantumLayerConfig) {
    w.u32(q.n_qubits);
    match q.embedding {
        EmbeddingKind::Angle { axis } => {
            w.u8(0);
            w.u32(AXES.iter().position(|a| *a == axis).unwrap());
        }
        EmbeddingKind::Amplitude => {
            w.u8(1);
            w.u32(0);
        }
        EmbeddingKind::Iqp { repeats } => {
            w.u8(2);
            w.u32(repeats);
        }
    }
    match q.circuit {
        CircuitKind::StronglyEntangling { layers } => {
            w.u8(0);
            w.u32(layers);
            w.u32(0);
            w.u64(0);
            w.f64(0.0);
        }
        CircuitKind::RandomLayers { layers, rots_per_layer, seed, imprimitive_ratio } => {
            w.u8(1);
            w.u32(layers);
            w.u32(rots_per_layer.unwrap_or(0));
            w.u64(seed);
            w.f64(imprimitive_ratio);
        }
    }
    w.u8(MEASUREMENTS.iter().position(|m| *m == q.measurement).unwrap() as u8);
}

pub fn encode_checkpoint(model: &Model) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(VERSION as usize);
    w.u32(model.input_shape().len());
    for d in model.input_shape() {
        w.u32(*d);
    }
    w.u32(model.layers().len());
    for def in model.layers() {
        match *def {
            LayerDef::Classical(LayerSpec::Conv2d { in_channels, out_channels, kernel, stride }) => {
                w.u8(1);
                for v in [in_channels, out_channels, kernel, stride] {
                    w.u32(v);
                }
            }
            LayerDef::Classical(LayerSpec::Relu) => w.u8(2),
            LayerDef::Classical(LayerSpec::MaxPool2d { kernel, stride }) => {
                w.u8(3);
                w.u32(kernel);
                w.u32(stride);
            }
            LayerDef::Classical(LayerSpec::Flatten) => w.u8(4),
            LayerDef::Classical(LayerSpec::Dense { inputs, outputs }) => {
                w.u8(5);
                w.u32(inputs);
                w.u32(outputs);
            }
            LayerDef::Classical(LayerSpec::Softmax) => w.u8(6),
            LayerDef::AngleRange => w.u8(7),
            LayerDef::ZeroPad { width } => {
                w.u8(8);
                w.u32(width);
            }
            LayerDef::Quantum(ref q) => {
                w.u8(9);
                write_quantum(&mut w, q);
            }
        }
    }
    let arrays = model.param_arrays();
    w.u32(arrays.len());
    for a in arrays {
        w.u64(a.len() as u64);
        for v in a {
            w.f64(*v);
        }
    }
    w.0
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        if self.bytes.len() - self.pos < n {
            return Err(format!("truncated at byte {}", self.pos));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }
    fn u8(&mut self) -> std::result::Result<u8, String> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> std::result::Result<usize, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn read_quantum(r: &mut Reader) -> std::result::Result<QuantumLayerConfig, String> {
    let n_qubits = r.u32()?;
    let tag = r.u8()?;
    let arg = r.u32()?;
    let embedding = match tag {
        0 => EmbeddingKind::Angle { axis: *AXES.get(arg).ok_or(format!("bad axis code {arg}"))? },
        1 => EmbeddingKind::Amplitude,
        2 => EmbeddingKind::Iqp { repeats: arg },
        t => return Err(format!("bad embedding code {t}")),
    };
    let tag = r.u8()?;
    let layers = r.u32()?;
    let rots = r.u32()?;
    let seed = r.u64()?;
    let ratio = r.f64()?;
    let circuit = match tag {
        0 => CircuitKind::StronglyEntangling { layers },
        1 => CircuitKind::RandomLayers {
            layers,
            rots_per_layer: (rots != 0).then_some(rots),
            seed,
            imprimitive_ratio: ratio,
        },
        t => return Err(format!("bad circuit code {t}")),
    };
    let m = r.u8()?;
    let measurement = *MEASUREMENTS.get(m as usize).ok_or(format!("bad measurement code {m}"))?;
    Ok(QuantumLayerConfig { n_qubits, embedding, circuit, measurement })
}

fn decode(bytes: &[u8]) -> std::result::Result<Model, String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("not a QSER checkpoint".into());
    }
    let version = r.u32()?;
    if version != VERSION as usize {
        return Err(format!("unsupported checkpoint version {version}"));
    }
    let rank = r.u32()?;
    let input_shape = (0..rank).map(|_| r.u32()).collect::<std::result::Result<Vec<_>, _>>()?;
    let n_layers = r.u32()?;
    let mut defs = Vec::with_capacity(n_layers.min(1024));
    for _ in 0..n_layers {
        let def = match r.u8()? {
            1 => LayerDef::Classical(LayerSpec::Conv2d {
                in_channels: r.u32()?,
                out_channels: r.u32()?,
                kernel: r.u32()?,
                stride: r.u32()?,
            }),
            2 => LayerDef::Classical(LayerSpec::Relu),
            3 => LayerDef::Classical(LayerSpec::MaxPool2d { kernel: r.u32()?, stride: r.u32()? }),
            4 => LayerDef::Classical(LayerSpec::Flatten),
            5 => LayerDef::Classical(LayerSpec::Dense { inputs: r.u32()?, outputs: r.u32()? }),
            6 => LayerDef::Classical(LayerSpec::Softmax),
            7 => LayerDef::AngleRange,
            8 => LayerDef::ZeroPad { width: r.u32()? },
            9 => LayerDef::Quantum(read_quantum(&mut r)?),
            t => return Err(format!("unknown layer tag {t}")),
        };
        defs.push(def);
    }
    let n_arrays = r.u32()?;
    let mut arrays = Vec::with_capacity(n_arrays.min(1024));
    for _ in 0..n_arrays {
        let len = r.u64()? as usize;
        if len > (bytes.len() - r.pos) / 8 {
            return Err(format!("parameter array of {len} values overruns the file"));
        }
        arrays.push((0..len).map(|_| r.f64()).collect::<std::result::Result<Vec<_>, _>>()?);
    }
    if r.pos != bytes.len() {
        return Err(format!("{} trailing byte(s)", bytes.len() - r.pos));
    }
    Model::from_parts(&input_shape, defs, arrays).map_err(|e| e.to_string())
}

pub fn decode_checkpoint(bytes: &[u8]) -> std::result::Result<Model, String> {
    decode(bytes)
}

pub fn save_checkpoint(path: &Path, model: &Model) -> Result<()> {
    std::fs::write(path, encode_checkpoint(model)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Model> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|m| Error::format(path, m))
}
