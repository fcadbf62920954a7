use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{synthesize, PgaError, PgaModel};
use crate::geometry::{affine_apply, validate_shape, AffineMap, LandmarkMatrix, ShapeDiagnostics};
use crate::grassmann::{procrustes_rotation, GrassmannError, GrassmannPoint, LaDecomposition};

/// `steps` shapes synthesized at evenly spaced points of the segment from
/// `corner_a` to `corner_b` in normal coordinates, both ends included.
pub fn corner_sweep(
    model: &PgaModel,
    corner_a: &[f64],
    corner_b: &[f64],
    steps: usize,
) -> Result<Vec<GrassmannPoint>, PgaError> {
    if corner_a.len() != model.r() || corner_b.len() != model.r() {
        return Err(PgaError::CoordinateLength {
            expected: model.r(),
            got: corner_a.len().min(corner_b.len()),
        });
    }
    (0..steps)
        .map(|k| {
            let s = if steps > 1 { k as f64 / (steps - 1) as f64 } else { 0.0 };
            let t: Vec<f64> = corner_a.iter().zip(corner_b).map(|(a, b)| a + s * (b - a)).collect();
            synthesize(model, &t)
        })
        .collect()
}

/// Random vertex of the box `[lower, upper]` paired with its opposite
/// vertex, `count` times.
pub fn random_corner_pairs(lower: &[f64], upper: &[f64], count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let pick: Vec<bool> = (0..lower.len()).map(|_| rng.random()).collect();
            let a = pick
                .iter()
                .enumerate()
                .map(|(j, &hi)| if hi { upper[j] } else { lower[j] })
                .collect();
            let b = pick
                .iter()
                .enumerate()
                .map(|(j, &hi)| if hi { lower[j] } else { upper[j] })
                .collect();
            (a, b)
        })
        .collect()
}

/// Average affine map of a set of decompositions, with each
/// representative first rotated onto `frame` so the linear parts are
/// expressed in a common orientation.
pub fn mean_affine(decomps: &[LaDecomposition], frame: &GrassmannPoint) -> Result<AffineMap, GrassmannError> {
    let mut m = Matrix2::zeros();
    let mut b = Vector2::zeros();
    for d in decomps {
        let r = procrustes_rotation(frame, &d.point);
        m += r.transpose() * d.affine.linear();
        b += d.affine.translation();
    }
    let k = decomps.len().max(1) as f64;
    Ok(AffineMap::new(m / k, b / k)?)
}

/// Renders every point with `affine` and validates the result.
pub fn sweep_diagnostics(
    points: &[GrassmannPoint],
    affine: &AffineMap,
) -> Result<Vec<(LandmarkMatrix, ShapeDiagnostics)>, GrassmannError> {
    points
        .iter()
        .map(|p| {
            let rep = LandmarkMatrix::new(p.rep().clone())?;
            let x = affine_apply(&rep, affine);
            let d = validate_shape(&x);
            Ok((x, d))
        })
        .collect()
}
