use std::path::Path;

use nalgebra::DMatrix;

use super::{read_text, write_atomic, IoError};
use crate::geometry::LandmarkMatrix;

/// A named landmark listing.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateFile {
    pub name: String,
    pub shape: LandmarkMatrix,
}

/// Renders `shape` as a coordinate listing. Values use 17 significant
/// digits so they parse back to the same bits.
pub fn format_coordinates(shape: &LandmarkMatrix, name: &str) -> String {
    let mut out = String::with_capacity(48 * (shape.n() + 1));
    out.push_str(name.lines().next().unwrap_or("").trim());
    out.push('\n');
    for [x, y] in shape.rows() {
        out.push_str(&format!("{x:.16e} {y:.16e}\n"));
    }
    out
}

/// Parses a coordinate listing. Blank lines and lines starting with `#`
/// after the name line are skipped.
pub fn parse_coordinates(text: &str) -> Result<CoordinateFile, IoError> {
    let mut lines = text.lines().enumerate();
    let name = match lines.next() {
        Some((_, l)) => l.trim().to_string(),
        None => return Err(IoError::TooFewPoints { got: 0 }),
    };
    let mut values = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = 0;
        for (column, token) in tokens(raw) {
            fields += 1;
            if fields > 2 {
                return Err(IoError::Parse {
                    line: i + 1,
                    column,
                    message: "expected exactly two values per line".into(),
                });
            }
            let v: f64 = token.parse().map_err(|_| IoError::Parse {
                line: i + 1,
                column,
                message: format!("`{token}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(IoError::Parse {
                    line: i + 1,
                    column,
                    message: format!("`{token}` is not finite"),
                });
            }
            values.push(v);
        }
        if fields < 2 {
            return Err(IoError::Parse {
                line: i + 1,
                column: raw.len() + 1,
                message: "expected exactly two values per line".into(),
            });
        }
    }
    let n = values.len() / 2;
    if n < 3 {
        return Err(IoError::TooFewPoints { got: n });
    }
    let shape = LandmarkMatrix::new(DMatrix::from_row_slice(n, 2, &values))?;
    Ok(CoordinateFile { name, shape })
}

/// Whitespace-separated tokens with their 1-based byte column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - line.as_ptr() as usize + 1, t))
}

pub fn read_coordinates(path: &Path) -> Result<CoordinateFile, IoError> {
    parse_coordinates(&read_text(path)?)
}

pub fn write_coordinates(path: &Path, shape: &LandmarkMatrix, name: &str) -> Result<(), IoError> {
    write_atomic(path, format_coordinates(shape, name).as_bytes())
}
