use nalgebra::{DMatrix, Matrix2, Vector2};

use super::{GrassmannError, GrassmannPoint};
use crate::geometry::{affine_apply, AffineMap, LandmarkMatrix, RANK_TOL};
use crate::linalg::{thin_svd, to_matrix2};

/// `X = X̃·M + 1·diag(b)` with `X̃` orthonormal and column-centered.
#[derive(Debug, Clone)]
pub struct LaDecomposition {
    pub point: GrassmannPoint,
    pub affine: AffineMap,
}

/// Landmark-affine standardization.
///
/// `b` is the landmark centroid and `X − 1bᵀ = U Σ Vᵀ` (thin SVD, `V`
/// columns sign-fixed to a positive leading entry). The representative is
/// `U` and the affine part is `M = Σ Vᵀ`.
pub fn la_standardize(x: &LandmarkMatrix) -> Result<LaDecomposition, GrassmannError> {
    let b = x.centroid();
    let pts = x.points();
    let centered = DMatrix::from_fn(x.n(), 2, |i, j| pts[(i, j)] - b[j]);
    let svd = thin_svd(&centered);
    let ratio = if svd.s[0] > 0.0 { svd.s[1] / svd.s[0] } else { 0.0 };
    if !(ratio > RANK_TOL) {
        return Err(GrassmannError::DegenerateShape { ratio });
    }
    let m = Matrix2::from_diagonal(&Vector2::new(svd.s[0], svd.s[1])) * to_matrix2(&svd.v).transpose();
    let affine = AffineMap::new(m, b)?;
    Ok(LaDecomposition {
        point: GrassmannPoint::from_orthonormal(svd.u),
        affine,
    })
}

/// Applies the stored affine map to the representative.
pub fn la_reconstruct(d: &LaDecomposition) -> Result<LandmarkMatrix, GrassmannError> {
    let rep = LandmarkMatrix::new(d.point.rep().clone())?;
    Ok(affine_apply(&rep, &d.affine))
}
