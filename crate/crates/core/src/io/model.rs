use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{from_json, read_text, to_json, write_atomic, IoError};
use crate::geometry::AffineMap;
use crate::grassmann::{GrassmannPoint, TangentVector, TANGENCY_TOL};
use crate::pga::{PgaDomain, PgaModel, FLATTEN_ORDER};

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Orthonormality slack accepted for a stored mean representative.
const ORTHO_TOL: f64 = 1e-10;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRecord {
    lower: Vec<f64>,
    upper: Vec<f64>,
    radii: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    format_version: u64,
    flatten_order: String,
    n: usize,
    r: usize,
    mean: Vec<f64>,
    eigenvalues: Vec<f64>,
    basis: Vec<Vec<f64>>,
    domain: DomainRecord,
    training_coords: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference_affine: Option<[f64; 6]>,
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    m.as_slice().to_vec()
}

fn length(path: &str, got: usize, expected: usize) -> Result<(), IoError> {
    if got != expected {
        return Err(IoError::Schema {
            path: path.into(),
            message: format!("expected {expected} values, got {got}"),
        });
    }
    Ok(())
}

pub fn model_to_json(model: &PgaModel) -> Result<String, IoError> {
    let record = ModelRecord {
        format_version: MODEL_FORMAT_VERSION,
        flatten_order: FLATTEN_ORDER.into(),
        n: model.n(),
        r: model.r(),
        mean: flatten(model.mean.rep()),
        eigenvalues: model.eigenvalues.clone(),
        basis: model.basis.iter().map(|u| flatten(u.mat())).collect(),
        domain: DomainRecord {
            lower: model.domain.lower.clone(),
            upper: model.domain.upper.clone(),
            radii: model.domain.radii.clone(),
        },
        training_coords: model
            .training_coords
            .row_iter()
            .map(|row| row.iter().copied().collect())
            .collect(),
        spectrum: Some(model.spectrum.clone()),
        reference_affine: model.reference_affine.as_ref().map(AffineMap::components),
    };
    to_json(&record)
}

pub fn model_from_json(text: &str) -> Result<PgaModel, IoError> {
    let rec: ModelRecord = from_json(text)?;
    if rec.format_version != MODEL_FORMAT_VERSION {
        return Err(IoError::Version {
            found: rec.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    if rec.flatten_order != FLATTEN_ORDER {
        return Err(IoError::Schema {
            path: "flatten_order".into(),
            message: format!("unsupported value `{}`", rec.flatten_order),
        });
    }
    let (n, r) = (rec.n, rec.r);
    if n < 3 || r == 0 {
        return Err(IoError::Schema {
            path: "n".into(),
            message: format!("need n >= 3 and r >= 1 (got n = {n}, r = {r})"),
        });
    }
    length("mean", rec.mean.len(), 2 * n)?;
    length("eigenvalues", rec.eigenvalues.len(), r)?;
    length("basis", rec.basis.len(), r)?;
    for (j, b) in rec.basis.iter().enumerate() {
        length(&format!("basis[{j}]"), b.len(), 2 * n)?;
    }
    length("domain.lower", rec.domain.lower.len(), r)?;
    length("domain.upper", rec.domain.upper.len(), r)?;
    length("domain.radii", rec.domain.radii.len(), r)?;
    for (i, row) in rec.training_coords.iter().enumerate() {
        length(&format!("training_coords[{i}]"), row.len(), r)?;
    }

    let mean_rep = DMatrix::from_column_slice(n, 2, &rec.mean);
    let gram_err = (mean_rep.transpose() * &mean_rep - DMatrix::identity(2, 2)).amax();
    if !(gram_err <= ORTHO_TOL) {
        return Err(IoError::Invalid(format!(
            "mean representative is not orthonormal (deviation {gram_err:e})"
        )));
    }
    let mean = GrassmannPoint::from_orthonormal(mean_rep);
    let basis = rec
        .basis
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let mat = DMatrix::from_column_slice(n, 2, b);
            let residual = (mean.rep().transpose() * &mat).norm();
            if !(residual <= TANGENCY_TOL) {
                return Err(IoError::Invalid(format!(
                    "basis[{j}] is not horizontal at the mean (residual {residual:e})"
                )));
            }
            Ok(TangentVector::from_parts(mean.clone(), mat))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = rec.training_coords.len();
    let training_coords = DMatrix::from_fn(rows, r, |i, j| rec.training_coords[i][j]);
    let reference_affine = rec.reference_affine.map(AffineMap::from_components).transpose()?;
    Ok(PgaModel {
        mean,
        basis,
        spectrum: rec.spectrum.unwrap_or_else(|| rec.eigenvalues.clone()),
        eigenvalues: rec.eigenvalues,
        domain: PgaDomain {
            lower: rec.domain.lower,
            upper: rec.domain.upper,
            radii: rec.domain.radii,
        },
        training_coords,
        reference_affine,
    })
}

pub fn write_model(path: &Path, model: &PgaModel) -> Result<(), IoError> {
    write_atomic(path, model_to_json(model)?.as_bytes())
}

pub fn read_model(path: &Path) -> Result<PgaModel, IoError> {
    model_from_json(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_dataset, synthetic_baselines, PerturbationPlan};
    use crate::grassmann::la_standardize;
    use crate::pga::{karcher_mean, pga_fit};
    use nalgebra::{Matrix2, Vector2};

    fn fitted() -> PgaModel {
        let data = gen_dataset(&synthetic_baselines(), PerturbationPlan::PerBaseline(2), 0.2, 5, 31).unwrap();
        let pts: Vec<_> = data.shapes().map(|x| la_standardize(x).unwrap().point).collect();
        let mean = karcher_mean(&pts, 1e-11, 100).unwrap().point;
        let mut m = pga_fit(&pts, &mean, 4).unwrap();
        m.reference_affine = Some(AffineMap::new(Matrix2::new(1.3, 0.1, -0.2, 0.07), Vector2::new(0.4, 1e-3)).unwrap());
        m
    }

    fn assert_same(a: &PgaModel, b: &PgaModel) {
        assert_eq!(a.mean.rep(), b.mean.rep());
        for (u, v) in a.basis.iter().zip(&b.basis) {
            assert_eq!(u.mat(), v.mat());
        }
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.spectrum, b.spectrum);
        assert_eq!(a.domain, b.domain);
        assert_eq!(a.training_coords, b.training_coords);
        assert_eq!(a.reference_affine, b.reference_affine);
    }

    #[test]
    fn round_trip_bit_exact_and_deterministic() {
        let m = fitted();
        let text = model_to_json(&m).unwrap();
        let back = model_from_json(&text).unwrap();
        assert_same(&m, &back);
        assert_eq!(model_to_json(&back).unwrap(), text);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("model.json");
        write_model(&p, &m).unwrap();
        assert_same(&m, &read_model(&p).unwrap());
    }

    #[test]
    fn missing_key_is_named() {
        let m = fitted();
        let mut v: serde_json::Value = serde_json::from_str(&model_to_json(&m).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("eigenvalues");
        let err = model_from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, IoError::Schema { .. }));
        assert!(err.to_string().contains("eigenvalues"), "{err}");
    }

    #[test]
    fn wrong_version_and_bad_lengths_rejected() {
        let m = fitted();
        let mut v: serde_json::Value = serde_json::from_str(&model_to_json(&m).unwrap()).unwrap();
        v["format_version"] = 99.into();
        assert!(matches!(
            model_from_json(&v.to_string()),
            Err(IoError::Version { found: 99, .. })
        ));
        let mut v: serde_json::Value = serde_json::from_str(&model_to_json(&m).unwrap()).unwrap();
        v["domain"]["radii"].as_array_mut().unwrap().pop();
        let err = model_from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("domain.radii"), "{err}");
    }
}
