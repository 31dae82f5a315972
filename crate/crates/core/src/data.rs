//! Labels, splits and the synthetic corpus.
//!
//! # Synthetic corpus
//!
//! Each example is an `n_mels x n_frames` grid holding one Gaussian ridge
//! across the Mel axis whose centre drifts linearly in time:
//!
//! ```text
//! centre_k(t) = n_mels (k + 1) / (K + 1) + slope_k (t / (n_frames - 1) - 1/2) + jitter
//! value(m, t) = amp * exp(-(m - centre_k(t))^2 / (2 width^2)) + noise
//! ```
//!
//! with `width = 0.02 n_mels`, `slope_k = +/-0.1 n_mels` (positive for even
//! `k`), `jitter ~ U(-width/4, width/4)` and `amp ~ U(0.9, 1.1)`. The noise
//! is i.i.d. Gaussian with variance `mean(ridge^2) / 10^(snr_db / 10)`.
//! Example `i` of class `k` draws from the `Synth` stream with sub-stream
//! `k * 2^16 + i`, so any example can be regenerated on its own.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::nn::Tensor;
use crate::rng::{SeededRng, Stream};
use crate::{Error, Result};

pub const BINARY_CLASSES: [&str; 2] = ["low", "high"];
pub const EMOTION_CLASSES: [&str; 4] = ["angry", "happy", "neutral", "sad"];

/// Class names for a 2-class (valence) or 4-class (emotion) task.
pub fn class_names(n_classes: usize) -> Result<&'static [&'static str]> {
    match n_classes {
        2 => Ok(&BINARY_CLASSES),
        4 => Ok(&EMOTION_CLASSES),
        n => Err(Error::Data(format!("tasks have 2 or 4 classes, got {n}"))),
    }
}

/// Looks a class name up in both label sets. Returns `(index, n_classes)`.
pub fn parse_class_name(name: &str) -> Option<(usize, usize)> {
    let name = name.trim().to_ascii_lowercase();
    if let Some(i) = BINARY_CLASSES.iter().position(|c| *c == name) {
        return Some((i, 2));
    }
    EMOTION_CLASSES.iter().position(|c| *c == name).map(|i| (i, 4))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawLabel {
    Valence(f64),
    Category(String),
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub feature_path: String,
    pub label: usize,
    pub raw_label: RawLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ValenceScheme {
    /// Low below 3, High from 3 up.
    #[default]
    Iemocap,
    /// Low below 0, High above 0; exactly 0 is rejected.
    Recola,
}

pub const LOW: usize = 0;
pub const HIGH: usize = 1;

pub fn binarize_valence(value: f64, scheme: ValenceScheme) -> Result<usize> {
    if !value.is_finite() {
        return Err(Error::Data(format!("non-finite valence {value}")));
    }
    match scheme {
        ValenceScheme::Iemocap => Ok(if value < 3.0 { LOW } else { HIGH }),
        ValenceScheme::Recola if value == 0.0 => {
            Err(Error::Data("RECOLA valence of exactly 0 is neither negative nor positive".into()))
        }
        ValenceScheme::Recola => Ok(if value < 0.0 { LOW } else { HIGH }),
    }
}

/// Anything carrying a class index.
pub trait Labeled {
    fn label(&self) -> usize;
}

impl Labeled for Example {
    fn label(&self) -> usize {
        self.label
    }
}

impl Labeled for usize {
    fn label(&self) -> usize {
        *self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SplitSpec {
    pub seed: u64,
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { seed: 0, train: 0.8, val: 0.1, test: 0.1, stratified: true }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::Config(format!("split fractions must be positive, got {parts:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions must sum to 1, got {parts:?}")));
        }
        Ok(())
    }

    /// Sizes for `n` items by cumulative rounding.
    fn sizes(&self, n: usize) -> (usize, usize) {
        let n_train = libm::round(self.train * n as f64) as usize;
        let n_train_val = (libm::round((self.train + self.val) * n as f64) as usize).clamp(n_train, n);
        (n_train.min(n), n_train_val - n_train.min(n))
    }
}

/// Deterministic train/val/test split. Each output keeps the input order.
/// With `stratified`, every class in `0..=max_label` must be present and is
/// split on its own.
pub fn split<T: Labeled>(items: Vec<T>, spec: &SplitSpec) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    spec.validate()?;
    let n = items.len();
    // 0 = train, 1 = val, 2 = test
    let mut assignment = vec![2u8; n];
    let mut assign = |indices: &mut Vec<usize>, sub: u32| {
        SeededRng::new(spec.seed, Stream::Split, sub).shuffle(indices);
        let (n_train, n_val) = spec.sizes(indices.len());
        for (rank, &i) in indices.iter().enumerate() {
            assignment[i] = if rank < n_train {
                0
            } else if rank < n_train + n_val {
                1
            } else {
                2
            };
        }
    };
    if spec.stratified && n > 0 {
        let n_classes = items.iter().map(Labeled::label).max().unwrap_or(0) + 1;
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        for (i, item) in items.iter().enumerate() {
            by_class[item.label()].push(i);
        }
        if let Some(empty) = by_class.iter().position(Vec::is_empty) {
            return Err(Error::Data(format!("class {empty} has no examples; cannot stratify")));
        }
        for (class, indices) in by_class.iter_mut().enumerate() {
            assign(indices, class as u32 + 1);
        }
    } else {
        let mut indices: Vec<usize> = (0..n).collect();
        assign(&mut indices, 0);
    }
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (item, a) in items.into_iter().zip(assignment) {
        match a {
            0 => train.push(item),
            1 => val.push(item),
            _ => test.push(item),
        }
    }
    Ok((train, val, test))
}

/// Knobs of the synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_per_class: usize,
    pub n_classes: usize,
    pub seed: u64,
    /// Signal-to-noise ratio; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub n_mels: usize,
    pub n_frames: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { n_per_class: 100, n_classes: 2, seed: 0, snr_db: 10.0, n_mels: 128, n_frames: 126 }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        class_names(self.n_classes)?;
        if self.n_per_class == 0 || self.n_per_class > u16::MAX as usize {
            return Err(Error::Config(format!("n_per_class must be in 1..=65535, got {}", self.n_per_class)));
        }
        if self.n_mels < 8 || self.n_frames < 2 {
            return Err(Error::Config("synthetic spectrograms need n_mels >= 8 and n_frames >= 2".into()));
        }
        if self.snr_db.is_nan() {
            return Err(Error::Config("snr_db is NaN".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthExample {
    pub class: usize,
    /// Index within the class.
    pub index: usize,
    pub features: Tensor,
}

impl Labeled for SynthExample {
    fn label(&self) -> usize {
        self.class
    }
}

/// One synthetic spectrogram; see the module docs for the construction.
pub fn synth_example(config: &SynthConfig, class: usize, index: usize) -> Tensor {
    let (n_mels, n_frames) = (config.n_mels, config.n_frames);
    let m = n_mels as f64;
    let width = 0.02 * m;
    let slope = if class.is_multiple_of(2) { 0.1 * m } else { -0.1 * m };
    let base = m * (class + 1) as f64 / (config.n_classes + 1) as f64;

    let mut rng = SeededRng::new(config.seed, Stream::Synth, ((class as u32) << 16) | index as u32);
    let jitter = rng.range(-width / 4.0, width / 4.0);
    let amp = rng.range(0.9, 1.1);

    let mut data = vec![0.0; n_mels * n_frames];
    for t in 0..n_frames {
        let centre = base + slope * (t as f64 / (n_frames - 1) as f64 - 0.5) + jitter;
        for mel in 0..n_mels {
            let d = mel as f64 - centre;
            data[mel * n_frames + t] = amp * libm::exp(-d * d / (2.0 * width * width));
        }
    }
    if config.snr_db.is_finite() {
        let power = data.iter().map(|v| v * v).sum::<f64>() / data.len() as f64;
        let sigma = libm::sqrt(power / libm::pow(10.0, config.snr_db / 10.0));
        for v in &mut data {
            *v += sigma * rng.normal();
        }
    }
    Tensor::from_parts(vec![n_mels, n_frames], data)
}

/// Whole corpus, class-major.
pub fn synthesize(config: &SynthConfig) -> Result<Vec<SynthExample>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.n_classes * config.n_per_class);
    for class in 0..config.n_classes {
        for index in 0..config.n_per_class {
            out.push(SynthExample { class, index, features: synth_example(config, class, index) });
        }
    }
    Ok(out)
}

/// A feature tensor with its class index; the unit the trainer consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Tensor,
    pub label: usize,
}

impl Labeled for Sample {
    fn label(&self) -> usize {
        self.label
    }
}

impl From<SynthExample> for Sample {
    fn from(e: SynthExample) -> Self {
        Sample { features: e.features, label: e.class }
    }
}
