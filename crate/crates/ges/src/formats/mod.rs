//! On-disk formats.
//!
//! | extension    | content                                              |
//! |--------------|------------------------------------------------------|
//! | `.ges.json`  | GES array: header, provenance, row-major tuples      |
//! | `.mtx`       | Matrix Market coordinate pattern, 1-based            |
//! | `.meta.json` | sidecar of a `.mtx`: indices, block width, provenance |
//! | `.phi.json`  | native matrix: per-column 0-based row lists          |

use std::fs;
use std::path::{Path, PathBuf};

use ges_core::{BinarySensingMatrix, GesArray, GesError, MatrixError};
use thiserror::Error;

use crate::config::RunConfig;
use crate::doc;
use crate::error::CliError;

pub mod ges_json;
pub mod mtx;
pub mod phi_json;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("JSON error at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("metadata mismatch: {0}")]
    MetadataMismatch(String),
    #[error(transparent)]
    Ges(#[from] GesError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_data() {
            FormatError::Schema(e.to_string())
        } else {
            FormatError::Json {
                line: e.line(),
                column: e.column(),
                msg: e.to_string(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Mtx,
    Phi,
}

impl MatrixFormat {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "mtx" => Some(MatrixFormat::Mtx),
            "phi" | "phi.json" => Some(MatrixFormat::Phi),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        let name = path.file_name()?.to_str()?;
        if name.ends_with(".mtx") {
            Some(MatrixFormat::Mtx)
        } else if name.ends_with(".phi.json") {
            Some(MatrixFormat::Phi)
        } else {
            None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixFormat::Mtx => "mtx",
            MatrixFormat::Phi => "phi",
        }
    }
}

/// `foo.mtx` → `foo.meta.json`.
pub fn meta_path(mtx: &Path) -> PathBuf {
    let name = mtx
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    let stem = name.strip_suffix(".mtx").unwrap_or(name);
    mtx.with_file_name(format!("{stem}.meta.json"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Parsed content plus warnings about stored hashes that do not match.
#[derive(Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

fn json_hash_warning(text: &str) -> Vec<String> {
    match serde_json::from_str::<serde_json::Value>(text).ok().as_ref().and_then(doc::check_hash) {
        Some(false) => vec!["content_hash does not match the content".to_string()],
        _ => Vec::new(),
    }
}

pub fn load_ges(path: &Path) -> Result<Loaded<GesArray>, CliError> {
    let text = read(path)?;
    let value =
        ges_json::parse(&text).map_err(|e| CliError::format(path.display().to_string(), e))?;
    Ok(Loaded {
        value,
        warnings: json_hash_warning(&text),
    })
}

pub fn load_matrix(path: &Path) -> Result<Loaded<BinarySensingMatrix>, CliError> {
    let shown = path.display().to_string();
    match MatrixFormat::from_path(path) {
        Some(MatrixFormat::Mtx) => {
            let meta = meta_path(path);
            let (body, sidecar) = (read(path)?, read(&meta)?);
            let value = mtx::parse(&body, &sidecar).map_err(|e| CliError::format(shown, e))?;
            Ok(Loaded {
                value,
                warnings: mtx::hash_warnings(&body, &sidecar),
            })
        }
        Some(MatrixFormat::Phi) => {
            let text = read(path)?;
            let value = phi_json::parse(&text).map_err(|e| CliError::format(shown, e))?;
            Ok(Loaded {
                value,
                warnings: json_hash_warning(&text),
            })
        }
        None => Err(CliError::Param(format!(
            "{shown}: unknown matrix format (expected .mtx or .phi.json)"
        ))),
    }
}

/// Writes a matrix; returns the paths written.
pub fn save_matrix(
    path: &Path,
    format: MatrixFormat,
    m: &BinarySensingMatrix,
    rc: &RunConfig,
) -> Result<Vec<PathBuf>, CliError> {
    match format {
        MatrixFormat::Mtx => {
            let meta = meta_path(path);
            let body = mtx::render(m);
            write(path, &body)?;
            write(&meta, &mtx::render_meta(m, &body, rc))?;
            Ok(vec![path.to_path_buf(), meta])
        }
        MatrixFormat::Phi => {
            write(path, &phi_json::render(m, rc))?;
            Ok(vec![path.to_path_buf()])
        }
    }
}

fn expect_format(v: &serde_json::Value, name: &str) -> Result<(), FormatError> {
    match v.get("format").and_then(|f| f.as_str()) {
        Some(f) if f == name => Ok(()),
        Some(f) => Err(FormatError::Schema(format!("expected format \"{name}\", found \"{f}\""))),
        None => Err(FormatError::Schema(format!("missing \"format\": \"{name}\""))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths() {
        assert_eq!(meta_path(Path::new("out/phi.mtx")), Path::new("out/phi.meta.json"));
        assert_eq!(MatrixFormat::from_path(Path::new("a.phi.json")), Some(MatrixFormat::Phi));
        assert_eq!(MatrixFormat::from_path(Path::new("a.mtx")), Some(MatrixFormat::Mtx));
        assert_eq!(MatrixFormat::from_path(Path::new("a.json")), None);
    }
}
