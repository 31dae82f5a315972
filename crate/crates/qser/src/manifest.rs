//! Manifest CSVs. The header is either `path,label` or `path,valence`.
//! Labels are class names (`low`, `high` or `angry`, `happy`, `neutral`,
//! `sad`) or class indices. Relative paths resolve against the manifest's
//! directory.

use std::path::{Path, PathBuf};

use qser_core::data::{binarize_valence, parse_class_name, Example, RawLabel, ValenceScheme};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub examples: Vec<Example>,
    /// 0 for an empty manifest with integer labels.
    pub n_classes: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Column {
    Label,
    Valence,
}

pub fn load_manifest(path: &Path, scheme: ValenceScheme) -> Result<Manifest> {
    let err = |line: usize, message: String| Error::Manifest { path: path.to_path_buf(), line, message };
    let mut reader =
        csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => err(1, format!("{other:?}")),
        })?;
    let header = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let column = match (header.get(0), header.get(1), header.len()) {
        (Some("path"), Some("label"), 2) => Column::Label,
        (Some("path"), Some("valence"), 2) => Column::Valence,
        _ => {
            return Err(err(
                1,
                format!(
                    "header must be `path,label` or `path,valence`, got `{}`",
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            ))
        }
    };
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut examples = Vec::new();
    let mut named_classes: Option<usize> = None;
    let mut max_index = None;
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| err(line, e.to_string()))?;
        let (Some(file), Some(value)) = (row.get(0), row.get(1)) else {
            return Err(err(line, "expected 2 fields".into()));
        };
        let file_path = resolve(&base, file);
        if !file_path.is_file() {
            return Err(err(line, format!("feature file {} does not exist", file_path.display())));
        }
        let (label, raw_label) = match column {
            Column::Valence => {
                let v: f64 = value.parse().map_err(|_| err(line, format!("valence `{value}` is not a number")))?;
                let label = binarize_valence(v, scheme).map_err(|e| err(line, e.to_string()))?;
                (label, RawLabel::Valence(v))
            }
            Column::Label => {
                if let Ok(idx) = value.parse::<usize>() {
                    max_index = max_index.max(Some(idx));
                    (idx, RawLabel::Index(idx))
                } else {
                    let (idx, n) =
                        parse_class_name(value).ok_or_else(|| err(line, format!("unknown class `{value}`")))?;
                    match named_classes {
                        Some(prev) if prev != n => {
                            return Err(err(line, format!("class `{value}` mixes 2-class and 4-class label sets")))
                        }
                        _ => named_classes = Some(n),
                    }
                    (idx, RawLabel::Category(value.to_ascii_lowercase()))
                }
            }
        };
        examples.push(Example { feature_path: file_path.to_string_lossy().into_owned(), label, raw_label });
    }
    let n_classes = match column {
        Column::Valence => 2,
        Column::Label => {
            let from_index = max_index.map(|m| (m + 1).max(2)).unwrap_or(0);
            match named_classes {
                Some(n) if from_index > n => {
                    return Err(err(1, format!("class index {} out of range for {n} classes", from_index - 1)))
                }
                Some(n) => n,
                None => from_index,
            }
        }
    };
    Ok(Manifest { examples, n_classes })
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Writes a `path,label` manifest.
pub fn write_manifest(path: &Path, rows: &[(String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let mut put = |a: &str, b: &str| w.write_record([a, b]).map_err(|e| Error::format(path, e.to_string()));
    put("path", "label")?;
    for (file, label) in rows {
        put(file, label)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
