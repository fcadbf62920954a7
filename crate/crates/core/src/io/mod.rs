//! Deterministic text formats.
//!
//! - Coordinate files: a name line followed by one `x y` pair per line.
//! - Model, blade and CST parameter files: JSON with a `format_version`
//!   key where applicable.
//! - CSV tables with a header row, one record per landmark.
//!
//! Floats are written in shortest round-trip or 17-digit form, so every
//! reader reproduces written values bit-exactly. Writers go through a
//! temporary file in the target directory and rename it into place.

mod blade;
mod coords;
mod model;
mod table;

pub use blade::{blade_from_file, read_blade, write_blade, BladeFile, StationEntry, BLADE_FORMAT_VERSION};
pub use coords::{format_coordinates, parse_coordinates, read_coordinates, write_coordinates, CoordinateFile};
pub use model::{model_from_json, model_to_json, read_model, write_model, MODEL_FORMAT_VERSION};
pub use table::{
    read_cst_params, read_wireframe_csv, write_cst_params, write_shape_csv, write_table_csv, write_wireframe_csv,
};

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::blade::BladeError;
use crate::geometry::GeometryError;
use crate::grassmann::GrassmannError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {error}")]
    File { path: PathBuf, error: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("coordinate listing has {got} points, at least 3 required")]
    TooFewPoints { got: usize },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported format_version {found} (expected {expected})")]
    Version { found: u64, expected: u64 },
    #[error("invalid content: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Blade(#[from] BladeError),
}

pub(crate) fn file_error(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |error| IoError::File {
        path: path.to_path_buf(),
        error,
    }
}

/// Writes `bytes` to a sibling temporary file and renames it onto `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(file_error(path))?;
    tmp.write_all(bytes).map_err(file_error(path))?;
    tmp.as_file().sync_all().map_err(file_error(path))?;
    tmp.persist(path).map_err(|e| IoError::File {
        path: path.to_path_buf(),
        error: e.error,
    })?;
    Ok(())
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(file_error(path))
}

/// Deserializes JSON, reporting the key path of the first schema violation.
pub(crate) fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            IoError::Json(inner)
        } else {
            IoError::Schema {
                path,
                message: inner.to_string(),
            }
        }
    })
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
