//! Audio to log-Mel spectrogram.
//!
//! Pipeline: resample to 22050 Hz (windowed sinc), cut or zero-pad to 3 s,
//! then a periodic-Hann STFT with a 2048-sample window and 512-sample hop
//! and no centre padding, a triangular HTK-scale Mel filterbank (peak 1, no
//! area normalisation) and `log10(max(energy, log_floor))`.

mod fft;
mod mel;
mod resample;

pub use mel::{hz_to_mel, mel_center_frequencies, mel_filterbank, mel_spectrogram, mel_to_hz};
pub use resample::resample;

use alloc::format;
use alloc::vec::Vec;

use crate::nn::Tensor;
use crate::{Error, Result};

/// Mono audio, samples nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Data("sample rate must be > 0".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::Data("non-finite audio sample".into()));
        }
        Ok(AudioClip { sample_rate, samples })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MelConfig {
    pub target_rate: u32,
    /// Seconds.
    pub duration: f64,
    /// STFT window and FFT size; must be a power of two.
    pub window: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub fmin: f64,
    /// `None` means `target_rate / 2`.
    pub fmax: Option<f64>,
    pub log_floor: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        MelConfig {
            target_rate: 22050,
            duration: 3.0,
            window: 2048,
            hop: 512,
            n_mels: 128,
            fmin: 0.0,
            fmax: None,
            log_floor: 1e-10,
        }
    }
}

impl MelConfig {
    pub fn fmax(&self) -> f64 {
        self.fmax.unwrap_or(f64::from(self.target_rate) / 2.0)
    }

    /// Samples after [`fix_length`].
    pub fn n_samples(&self) -> usize {
        libm::round(f64::from(self.target_rate) * self.duration) as usize
    }

    pub fn n_frames(&self) -> usize {
        let n = self.n_samples();
        if n < self.window {
            0
        } else {
            1 + (n - self.window) / self.hop
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_rate == 0 {
            return Err(Error::Config("target_rate must be > 0".into()));
        }
        if !self.window.is_power_of_two() || self.window < 2 {
            return Err(Error::Config(format!("window must be a power of two, got {}", self.window)));
        }
        if self.hop == 0 || self.hop > self.window {
            return Err(Error::Config(format!("hop must be in 1..=window, got {}", self.hop)));
        }
        if self.n_mels == 0 {
            return Err(Error::Config("n_mels must be >= 1".into()));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) || self.n_frames() == 0 {
            return Err(Error::Config(format!("duration {} s leaves no complete frame", self.duration)));
        }
        let fmax = self.fmax();
        if !(self.fmin >= 0.0 && fmax > self.fmin && fmax <= f64::from(self.target_rate) / 2.0) {
            return Err(Error::Config(format!("need 0 <= fmin < fmax <= rate/2, got {} / {fmax}", self.fmin)));
        }
        if !(self.log_floor.is_finite() && self.log_floor > 0.0) {
            return Err(Error::Config("log_floor must be > 0".into()));
        }
        Ok(())
    }
}

/// Truncates at the end or zero-pads at the end to `round(rate * duration)`
/// samples.
pub fn fix_length(mut clip: AudioClip, duration: f64) -> AudioClip {
    let n = libm::round(f64::from(clip.sample_rate) * duration) as usize;
    clip.samples.resize(n, 0.0);
    clip
}

/// Resample, fix the length and compute the log-Mel spectrogram.
pub fn extract(clip: &AudioClip, config: &MelConfig) -> Result<Tensor> {
    config.validate()?;
    let clip = resample(clip, config.target_rate);
    let clip = fix_length(clip, config.duration);
    mel_spectrogram(&clip, config)
}
