use alloc::vec::Vec;
use core::f64::consts::PI;

use super::AudioClip;

/// Zero crossings of the sinc kernel kept on each side.
const ZERO_CROSSINGS: f64 = 16.0;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        libm::sin(PI * x) / (PI * x)
    }
}

/// Band-limited resampling with a Hann-windowed sinc kernel. The cutoff is
/// the lower of the two Nyquist rates, the output has
/// `round(len * target / source)` samples, and each output's kernel weights
/// are normalised to sum to one, so a constant signal stays constant.
pub fn resample(clip: &AudioClip, target_rate: u32) -> AudioClip {
    assert!(target_rate > 0, "target rate must be > 0");
    if clip.sample_rate == target_rate || clip.samples.is_empty() {
        return AudioClip {
            sample_rate: target_rate,
            samples: if clip.sample_rate == target_rate { clip.samples.clone() } else { Vec::new() },
        };
    }
    let ratio = f64::from(target_rate) / f64::from(clip.sample_rate);
    let cutoff = ratio.min(1.0);
    let half_width = ZERO_CROSSINGS / cutoff;
    let x = &clip.samples;
    let out_len = libm::round(x.len() as f64 * ratio) as usize;
    let last = x.len() as isize - 1;
    let samples = (0..out_len)
        .map(|i| {
            let t = i as f64 / ratio;
            let lo = (libm::ceil(t - half_width) as isize).max(0);
            let hi = (libm::floor(t + half_width) as isize).min(last);
            let (mut acc, mut norm) = (0.0, 0.0);
            for j in lo..=hi {
                let d = t - j as f64;
                let window = 0.5 * (1.0 + libm::cos(PI * d / half_width));
                let w = sinc(cutoff * d) * window;
                acc += w * x[j as usize];
                norm += w;
            }
            if norm == 0.0 {
                0.0
            } else {
                acc / norm
            }
        })
        .collect();
    AudioClip { sample_rate: target_rate, samples }
}
