//! RIFF/WAVE reading (16-bit PCM or 32-bit float, mono or stereo) and
//! 16-bit PCM writing.

use std::path::Path;

use qser_core::features::AudioClip;

use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Parse failure with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavError {
    pub offset: usize,
    pub message: String,
}

fn fail<T>(offset: usize, message: impl Into<String>) -> std::result::Result<T, WavError> {
    Err(WavError { offset, message: message.into() })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], WavError> {
        if self.bytes.len() - self.pos < n {
            return fail(self.pos, format!("truncated: needed {n} more byte(s)"));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self) -> std::result::Result<u16, WavError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> std::result::Result<u32, WavError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

struct Format {
    tag: u16,
    channels: u16,
    rate: u32,
    bits: u16,
}

/// Decodes a WAV byte buffer; stereo is averaged to mono and integer
/// samples are scaled by `1 / 32768`.
pub fn parse_wav(bytes: &[u8]) -> std::result::Result<AudioClip, WavError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != b"RIFF" {
        return fail(0, "missing RIFF magic");
    }
    r.u32()?;
    if r.take(4)? != b"WAVE" {
        return fail(8, "missing WAVE magic");
    }
    let mut format: Option<Format> = None;
    loop {
        if r.pos == bytes.len() {
            return fail(r.pos, "no data chunk");
        }
        let chunk_at = r.pos;
        let id: [u8; 4] = r.take(4)?.try_into().unwrap();
        let size = r.u32()? as usize;
        let body_at = r.pos;
        match &id {
            b"fmt " => {
                if size < 16 {
                    return fail(chunk_at, format!("fmt chunk of {size} bytes is too short"));
                }
                let mut tag = r.u16()?;
                let channels = r.u16()?;
                let rate = r.u32()?;
                r.u32()?;
                r.u16()?;
                let bits = r.u16()?;
                if tag == FORMAT_EXTENSIBLE {
                    if size < 40 {
                        return fail(chunk_at, "extensible fmt chunk is too short");
                    }
                    r.take(8)?;
                    tag = r.u16()?;
                }
                format = Some(Format { tag, channels, rate, bits });
                r.pos = body_at;
                r.take(size + size % 2)?;
            }
            b"data" => {
                let Some(f) = format else {
                    return fail(chunk_at, "data chunk before fmt chunk");
                };
                let data = r.take(size)?;
                return decode(&f, data, body_at);
            }
            _ => {
                r.take(size + size % 2)?;
            }
        }
    }
}

fn decode(f: &Format, data: &[u8], at: usize) -> std::result::Result<AudioClip, WavError> {
    if !(1..=2).contains(&f.channels) {
        return fail(at, format!("{} channels; only mono and stereo are supported", f.channels));
    }
    if f.rate == 0 {
        return fail(at, "sample rate is 0");
    }
    let width = match (f.tag, f.bits) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_FLOAT, 32) => 4,
        (tag, bits) => return fail(at, format!("unsupported encoding: format tag {tag}, {bits} bits")),
    };
    let frame = width * f.channels as usize;
    if !data.len().is_multiple_of(frame) {
        return fail(at + data.len() - data.len() % frame, "data chunk ends mid-frame");
    }
    let sample = |chunk: &[u8]| -> f64 {
        if width == 2 {
            i16::from_le_bytes([chunk[0], chunk[1]]) as f64 / 32768.0
        } else {
            f32::from_le_bytes(chunk.try_into().unwrap()) as f64
        }
    };
    let mut samples = Vec::with_capacity(data.len() / frame);
    for (i, fr) in data.chunks_exact(frame).enumerate() {
        let sum: f64 = fr.chunks_exact(width).map(sample).sum();
        let v = sum / f.channels as f64;
        if !v.is_finite() {
            return fail(at + i * frame, "non-finite sample");
        }
        samples.push(v);
    }
    AudioClip::new(f.rate, samples).or_else(|e| fail(at, e.to_string()))
}

pub fn load_wav(path: &Path) -> Result<AudioClip> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_wav(&bytes).map_err(|e| Error::Wav { path: path.to_path_buf(), offset: e.offset, message: e.message })
}

/// Mono 16-bit PCM. Samples are clamped to `[-1, 1]` and rounded.
pub fn encode_wav_pcm16(clip: &AudioClip) -> Vec<u8> {
    let n = clip.samples.len();
    let mut out = Vec::with_capacity(44 + 2 * n);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + 2 * n) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&((2 * n) as u32).to_le_bytes());
    for s in &clip.samples {
        let v = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn save_wav(path: &Path, clip: &AudioClip) -> Result<()> {
    std::fs::write(path, encode_wav_pcm16(clip)).map_err(|e| Error::io(path, e))
}
