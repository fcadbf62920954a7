use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{from_json, read_coordinates, read_text, to_json, write_atomic, IoError};
use crate::blade::BladeDefinition;
use crate::geometry::{affine_apply, AffineMap, LandmarkMatrix};

pub const BLADE_FORMAT_VERSION: u64 = 1;

/// One station of a blade file: the section is given inline (`coords`) or
/// as a coordinate file path relative to the blade file (`file`). An
/// optional `affine` (components `[M11, M12, M21, M22, b1, b2]`) is applied
/// to the listed section, giving the physical section `X·M + 1bᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationEntry {
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<[f64; 6]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BladeFile {
    pub format_version: u64,
    pub stations: Vec<StationEntry>,
}

impl BladeFile {
    /// Inline listing of a blade's stations, hub to tip.
    pub fn from_blade(blade: &BladeDefinition) -> Self {
        let stations = blade
            .stations
            .iter()
            .map(|s| StationEntry {
                eta: s.eta,
                coords: Some(s.section.rows().collect()),
                file: None,
                affine: None,
            })
            .collect();
        Self {
            format_version: BLADE_FORMAT_VERSION,
            stations,
        }
    }
}

fn station_section(index: usize, entry: &StationEntry, base_dir: &Path) -> Result<LandmarkMatrix, IoError> {
    let listed = match (&entry.coords, &entry.file) {
        (Some(rows), None) => {
            if rows.len() < 3 {
                return Err(IoError::TooFewPoints { got: rows.len() });
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            LandmarkMatrix::new(DMatrix::from_row_slice(rows.len(), 2, &flat))?
        }
        (None, Some(file)) => read_coordinates(&base_dir.join(file))?.shape,
        _ => {
            return Err(IoError::Schema {
                path: format!("stations[{index}]"),
                message: "exactly one of `coords` and `file` is required".into(),
            })
        }
    };
    Ok(match entry.affine {
        Some(c) => affine_apply(&listed, &AffineMap::from_components(c)?),
        None => listed,
    })
}

/// Builds the blade described by `file`; relative station paths resolve
/// against `base_dir`.
pub fn blade_from_file(file: &BladeFile, base_dir: &Path) -> Result<BladeDefinition, IoError> {
    if file.format_version != BLADE_FORMAT_VERSION {
        return Err(IoError::Version {
            found: file.format_version,
            expected: BLADE_FORMAT_VERSION,
        });
    }
    let sections = file
        .stations
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((s.eta, station_section(i, s, base_dir)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(BladeDefinition::from_sections(sections)?)
}

pub fn read_blade(path: &Path) -> Result<BladeDefinition, IoError> {
    let file: BladeFile = from_json(&read_text(path)?)?;
    blade_from_file(&file, path.parent().unwrap_or(Path::new(".")))
}

/// Writes the stations inline.
pub fn write_blade(path: &Path, blade: &BladeDefinition) -> Result<(), IoError> {
    write_atomic(path, to_json(&BladeFile::from_blade(blade))?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blade::{synthetic_blade, BladeError};
    use crate::io::write_coordinates;

    #[test]
    fn round_trip_reproduces_sections() {
        let blade = synthetic_blade(51).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("blade.json");
        write_blade(&p, &blade).unwrap();
        let back = read_blade(&p).unwrap();
        for (a, b) in blade.stations.iter().zip(&back.stations) {
            assert_eq!(a.eta, b.eta);
            assert_eq!(a.section, b.section);
        }
        let bytes = std::fs::read(&p).unwrap();
        write_blade(&p, &back).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes);
    }

    #[test]
    fn file_references_and_override() {
        let blade = synthetic_blade(31).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut file = BladeFile::from_blade(&blade);
        write_coordinates(&dir.path().join("s0.dat"), &blade.stations[0].section, "hub").unwrap();
        file.stations[0].coords = None;
        file.stations[0].file = Some("s0.dat".into());
        file.stations[1].affine = Some([2.0, 0.0, 0.0, 2.0, 0.0, 1.0]);
        let b = blade_from_file(&file, dir.path()).unwrap();
        assert_eq!(b.stations[0].section, blade.stations[0].section);
        let want = blade.stations[1].section.points() * 2.0;
        let got = b.stations[1].section.points();
        assert!((got.column(0) - want.column(0)).amax() < 1e-15);
        assert!((got.column(1) - want.column(1).add_scalar(1.0)).amax() < 1e-15);
    }

    #[test]
    fn non_increasing_eta_rejected() {
        let blade = synthetic_blade(31).unwrap();
        let mut file = BladeFile::from_blade(&blade);
        file.stations[2].eta = file.stations[1].eta;
        let err = blade_from_file(&file, Path::new(".")).unwrap_err();
        assert!(matches!(
            err,
            IoError::Blade(BladeError::NonIncreasingSpan { index: 2 })
        ));
    }

    #[test]
    fn both_sources_rejected() {
        let blade = synthetic_blade(31).unwrap();
        let mut file = BladeFile::from_blade(&blade);
        file.stations[0].file = Some("x.dat".into());
        assert!(matches!(
            blade_from_file(&file, Path::new(".")),
            Err(IoError::Schema { .. })
        ));
    }
}
