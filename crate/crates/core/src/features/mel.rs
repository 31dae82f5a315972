use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use super::fft::Fft;
use super::{AudioClip, MelConfig};
use crate::nn::Tensor;
use crate::{Error, Result};

/// HTK Mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * libm::log10(1.0 + hz / 700.0)
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (libm::pow(10.0, mel / 2595.0) - 1.0)
}

/// `n_mels + 2` band edges equally spaced in Mel between fmin and fmax.
fn band_edges(config: &MelConfig) -> Vec<f64> {
    let lo = hz_to_mel(config.fmin);
    let hi = hz_to_mel(config.fmax());
    let n = config.n_mels + 1;
    (0..=n).map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / n as f64)).collect()
}

/// Centre frequency (Hz) of each Mel filter.
pub fn mel_center_frequencies(config: &MelConfig) -> Vec<f64> {
    let edges = band_edges(config);
    edges[1..=config.n_mels].to_vec()
}

/// `n_mels` rows of `window / 2 + 1` triangular weights over the FFT bins.
pub fn mel_filterbank(config: &MelConfig) -> Vec<Vec<f64>> {
    let edges = band_edges(config);
    let n_bins = config.window / 2 + 1;
    let bin_hz = f64::from(config.target_rate) / config.window as f64;
    (0..config.n_mels)
        .map(|m| {
            let (left, centre, right) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    let rising = (f - left) / (centre - left);
                    let falling = (right - f) / (right - centre);
                    rising.min(falling).max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Log-Mel spectrogram `[n_mels, n_frames]` of a clip already at
/// `config.target_rate` and exactly `config.n_samples()` long.
pub fn mel_spectrogram(clip: &AudioClip, config: &MelConfig) -> Result<Tensor> {
    config.validate()?;
    if clip.sample_rate != config.target_rate {
        return Err(Error::Data(format!(
            "clip at {} Hz, spectrogram expects {} Hz",
            clip.sample_rate, config.target_rate
        )));
    }
    if clip.samples.len() != config.n_samples() {
        return Err(Error::Data(format!(
            "clip has {} samples, spectrogram expects {}",
            clip.samples.len(),
            config.n_samples()
        )));
    }
    let n_fft = config.window;
    let n_frames = config.n_frames();
    let fft = Fft::new(n_fft);
    let hann: Vec<f64> = (0..n_fft).map(|i| 0.5 - 0.5 * libm::cos(TAU * i as f64 / n_fft as f64)).collect();
    // sparse filterbank: (first bin, weights)
    let bank: Vec<(usize, Vec<f64>)> = mel_filterbank(config)
        .into_iter()
        .map(|row| {
            let first = row.iter().position(|w| *w > 0.0).unwrap_or(0);
            let last = row.iter().rposition(|w| *w > 0.0).map_or(first, |l| l + 1);
            (first, row[first..last].to_vec())
        })
        .collect();

    let mut out = vec![0.0; config.n_mels * n_frames];
    let mut buf = vec![Complex64::new(0.0, 0.0); fft.len()];
    let mut power = vec![0.0; n_fft / 2 + 1];
    for t in 0..n_frames {
        let frame = &clip.samples[t * config.hop..t * config.hop + n_fft];
        for ((b, s), w) in buf.iter_mut().zip(frame).zip(&hann) {
            *b = Complex64::new(s * w, 0.0);
        }
        fft.process(&mut buf);
        for (p, b) in power.iter_mut().zip(&buf) {
            *p = b.norm_sqr();
        }
        for (m, (first, weights)) in bank.iter().enumerate() {
            let energy: f64 = weights.iter().zip(&power[*first..]).map(|(w, p)| w * p).sum();
            out[m * n_frames + t] = libm::log10(energy.max(config.log_floor));
        }
    }
    Tensor::new(vec![config.n_mels, n_frames], out)
}
