//! The work behind each CLI command, kept separate from argument parsing.

use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use qser_core::data::{split, Sample};
use qser_core::features::{extract, MelConfig};
use qser_core::train::{
    build_model, evaluate, model_input_shape, train_model_with, EpochRecord, EvalReport, GridContext, GridResult,
    History, HyperParams, Model,
};
use serde::Serialize;

use crate::checkpoint::save_checkpoint;
use crate::config::RunConfig;
use crate::corpus::load_samples;
use crate::error::{Error, Result};
use crate::grid::{run_grid_with, write_grid_csv};
use crate::manifest::load_manifest;
use crate::qft::write_qft;
use crate::wav::load_wav;

/// WAV files named by `input`: every `*.wav` directly inside a directory
/// (sorted by name), or the `path` column of a CSV manifest.
pub fn collect_wavs(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_dir() {
        let mut out = Vec::new();
        for entry in std::fs::read_dir(input).map_err(|e| Error::io(input, e))? {
            let path = entry.map_err(|e| Error::io(input, e))?.path();
            if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")) {
                out.push(path);
            }
        }
        out.sort();
        return Ok(out);
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(input)
        .map_err(|e| Error::format(input, e.to_string()))?;
    let base = input.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Manifest { path: input.into(), line: i + 2, message: e.to_string() })?;
        if let Some(p) = row.get(0) {
            out.push(base.join(p));
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct FeatureReport {
    pub written: Vec<PathBuf>,
    pub failures: Vec<(PathBuf, Error)>,
}

pub fn wav_to_features(path: &Path, mel: &MelConfig) -> Result<qser_core::nn::Tensor> {
    let clip = load_wav(path)?;
    Ok(extract(&clip, mel)?)
}

/// One `<out>/<stem>.qft` per input; failures are collected, not fatal.
pub fn extract_features(inputs: &[PathBuf], out_dir: &Path, mel: &MelConfig) -> Result<FeatureReport> {
    mel.validate().map_err(|e| Error::Config { field: "features".into(), message: e.to_string() })?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut report = FeatureReport::default();
    for input in inputs {
        let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let target = out_dir.join(format!("{stem}.qft"));
        match wav_to_features(input, mel).and_then(|t| write_qft(&target, &t)) {
            Ok(()) => report.written.push(target),
            Err(e) => report.failures.push((input.clone(), e)),
        }
    }
    Ok(report)
}

/// Train/val/test samples from a manifest, split per the run config.
pub struct Datasets {
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
    pub test: Vec<Sample>,
    pub n_classes: usize,
}

impl Datasets {
    /// Model input shape: one channel over the feature grid.
    pub fn input_shape(&self) -> Result<Vec<usize>> {
        let first = self.train.first().ok_or_else(|| qser_core::Error::Data("training split is empty".into()))?;
        Ok(model_input_shape(first.features.shape()))
    }
}

pub fn load_datasets(config: &RunConfig, manifest: &Path) -> Result<Datasets> {
    let m = load_manifest(manifest, config.data.valence_scheme)?;
    let samples = load_samples(&m.examples)?;
    let (train, val, test) = split(samples, &config.data.split)?;
    Ok(Datasets { train, val, test, n_classes: m.n_classes })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub model: &'static str,
    pub trainable_params: usize,
    pub epochs_run: usize,
    pub final_val_uar: Option<f64>,
    /// `None` when the test split is empty.
    pub test: Option<EvalReport>,
}

pub fn history_csv(history: &History) -> String {
    let mut out = String::from("epoch,train_loss,val_uar\n");
    for r in &history.epochs {
        let val = r.val_uar.map(|u| u.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", r.epoch, r.train_loss, val);
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Builds, trains and evaluates one model and writes `model.qser`,
/// `history.csv` and `report.json` into `out_dir`.
pub fn train_and_report(
    hp: &HyperParams,
    config: &RunConfig,
    data: &Datasets,
    out_dir: &Path,
    observer: impl FnMut(&EpochRecord) -> ControlFlow<()>,
) -> Result<(Model, RunReport)> {
    let mut model = build_model(hp, &config.model, &data.input_shape()?, data.n_classes)?;
    let history = train_model_with(&mut model, &data.train, &data.val, hp, observer)?;
    let test = if data.test.is_empty() { None } else { Some(evaluate(&model, &data.test)?) };
    let report = RunReport {
        model: if hp.quantum.is_some() { "hybrid" } else { "classical" },
        trainable_params: model.count_params(),
        epochs_run: history.epochs.len(),
        final_val_uar: history.final_val_uar(),
        test,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    save_checkpoint(&out_dir.join("model.qser"), &model)?;
    write_text(&out_dir.join("history.csv"), &history_csv(&history))?;
    write_text(&out_dir.join("report.json"), &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok((model, report))
}

/// Runs the configured grid and writes `grid_results.csv`. With
/// `grid.retrain_best`, the best point is retrained for `train.epochs`
/// epochs into `<out>/best/`.
pub fn run_grid_search(
    config: &RunConfig,
    data: &Datasets,
    out_dir: &Path,
    workers: usize,
    on_point: impl Fn(&GridResult) + Sync,
) -> Result<(Vec<GridResult>, Option<RunReport>)> {
    let ctx = GridContext {
        base: &config.train,
        arch: &config.model,
        budget: config.grid.budget,
        n_classes: data.n_classes,
        train: &data.train,
        val: &data.val,
    };
    let results = run_grid_with(&config.grid.space, &ctx, workers, on_point)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_grid_csv(&out_dir.join("grid_results.csv"), &results)?;
    let best = match results.first() {
        Some(best) if config.grid.retrain_best && best.val_uar.is_some() => {
            let hp = best.point.hyper_params(&config.train);
            let (_, report) =
                train_and_report(&hp, config, data, &out_dir.join("best"), |_| ControlFlow::Continue(()))?;
            Some(report)
        }
        _ => None,
    };
    Ok((results, best))
}
