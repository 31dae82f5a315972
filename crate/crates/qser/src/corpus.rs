//! Synthetic corpora on disk and loading of feature sets.

use std::path::{Path, PathBuf};

use qser_core::data::{class_names, synthesize, Example, Sample, SynthConfig};

use crate::error::{Error, Result};
use crate::manifest::write_manifest;
use crate::qft::{read_qft, write_qft};

pub const MANIFEST_NAME: &str = "manifest.csv";

/// Writes `<out>/<class>/<idx>.qft` for every example and
/// `<out>/manifest.csv` listing them class by class. Returns the manifest
/// path.
pub fn generate_synthetic(config: &SynthConfig, out_dir: &Path) -> Result<PathBuf> {
    let names = class_names(config.n_classes)?;
    let corpus = synthesize(config)?;
    for name in names {
        let dir = out_dir.join(name);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    let mut rows = Vec::with_capacity(corpus.len());
    for ex in &corpus {
        let rel = format!("{}/{}.qft", names[ex.class], ex.index);
        write_qft(&out_dir.join(&rel), &ex.features)?;
        rows.push((rel, names[ex.class].to_string()));
    }
    let manifest = out_dir.join(MANIFEST_NAME);
    write_manifest(&manifest, &rows)?;
    Ok(manifest)
}

/// Reads the feature file of every example.
pub fn load_samples(examples: &[Example]) -> Result<Vec<Sample>> {
    examples.iter().map(|ex| Ok(Sample { features: read_qft(Path::new(&ex.feature_path))?, label: ex.label })).collect()
}
