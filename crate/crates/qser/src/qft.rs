//! `.qft` feature files: `"QFT1"`, `u32` n_mels, `u32` n_frames, then
//! `n_mels * n_frames` little-endian `f64` values, row-major (one Mel band
//! per row).

use std::path::Path;

use qser_core::nn::Tensor;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"QFT1";
const HEADER: usize = 12;

pub fn encode_qft(features: &Tensor) -> std::result::Result<Vec<u8>, String> {
    let [n_mels, n_frames] = *features.shape() else {
        return Err(format!("feature tensor must be 2-D, got shape {:?}", features.shape()));
    };
    let (Ok(m), Ok(f)) = (u32::try_from(n_mels), u32::try_from(n_frames)) else {
        return Err("feature dimensions exceed u32".into());
    };
    let mut out = Vec::with_capacity(HEADER + 8 * features.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&m.to_le_bytes());
    out.extend_from_slice(&f.to_le_bytes());
    for v in features.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_qft(bytes: &[u8]) -> std::result::Result<Tensor, String> {
    if bytes.len() < HEADER || &bytes[..4] != MAGIC {
        return Err("not a QFT1 feature file".into());
    }
    let n_mels = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let n_frames = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = n_mels
        .checked_mul(n_frames)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER))
        .ok_or("feature dimensions overflow")?;
    if bytes.len() != expected {
        return Err(format!("{n_mels}x{n_frames} features need {expected} bytes, file has {}", bytes.len()));
    }
    let data = bytes[HEADER..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Tensor::new(vec![n_mels, n_frames], data).map_err(|e| e.to_string())
}

pub fn write_qft(path: &Path, features: &Tensor) -> Result<()> {
    let bytes = encode_qft(features).map_err(|m| Error::format(path, m))?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_qft(path: &Path) -> Result<Tensor> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_qft(&bytes).map_err(|m| Error::format(path, m))
}
