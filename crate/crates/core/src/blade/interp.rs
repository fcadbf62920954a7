use nalgebra::{DMatrix, Matrix2};

use super::{BladeDefinition, BladeError};
use crate::geometry::{affine_apply, LandmarkMatrix};
use crate::grassmann::{geodesic_point, GrassmannPoint};
use crate::linalg::{from_matrix2, polar_factor, to_matrix2};

/// Point at parameter `s` on the geodesic segment `a → b`, with its
/// representative rotated so `s = 1` lands on `b`'s representative rather
/// than on the geodesic's own endpoint frame.
///
/// The geodesic ends at `b·W` with `W` the orthogonal polar factor of
/// `bᵀa`; the correction `Rot(s·φ)`, `Wᵀ = Rot(φ)`, removes it. When the
/// representatives are Procrustes-clustered `W` is the identity and the
/// correction vanishes.
pub(crate) fn segment_point(a: &GrassmannPoint, b: &GrassmannPoint, s: f64) -> Result<GrassmannPoint, BladeError> {
    let y = geodesic_point(a, b, s)?;
    let w = polar_factor(&to_matrix2(&(b.rep().transpose() * a.rep())));
    if w.determinant() < 0.0 {
        return Ok(y);
    }
    let wt = w.transpose();
    let phi = wt[(1, 0)].atan2(wt[(0, 0)]);
    let (sn, cs) = (s * phi).sin_cos();
    Ok(y.rotated(&from_matrix2(&Matrix2::new(cs, -sn, sn, cs))))
}

/// Section at span `η`: piecewise-geodesic blend of the clustered
/// representatives, rendered with the interpolated affine profiles. The
/// segment parameter is linear in `η`.
pub fn interpolate_section(blade: &BladeDefinition, eta: f64) -> Result<LandmarkMatrix, BladeError> {
    let (lo, hi) = blade.span();
    if !(eta >= lo && eta <= hi) {
        return Err(BladeError::OutOfRange { eta, lo, hi });
    }
    let etas = blade.etas();
    let k = etas.partition_point(|e| *e <= eta).clamp(1, etas.len() - 1) - 1;
    let s = (eta - etas[k]) / (etas[k + 1] - etas[k]);
    let point = segment_point(&blade.aligned[k], &blade.aligned[k + 1], s)?;
    let affine = blade.profiles.eval(eta)?;
    let rep = LandmarkMatrix::new(point.rep().clone())?;
    Ok(affine_apply(&rep, &affine))
}

/// Stacked sections, `spans × n` rows of `(x, y, η)` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Wireframe {
    pub spans: usize,
    pub n: usize,
    pub points: DMatrix<f64>,
}

impl Wireframe {
    pub fn get(&self, span: usize, landmark: usize) -> [f64; 3] {
        let r = span * self.n + landmark;
        [self.points[(r, 0)], self.points[(r, 1)], self.points[(r, 2)]]
    }
}

/// Sections at `spans` uniformly spaced span positions covering the blade.
pub fn export_wireframe(blade: &BladeDefinition, spans: usize) -> Result<Wireframe, BladeError> {
    if spans < 2 {
        return Err(BladeError::TooFewStations(spans));
    }
    let (lo, hi) = blade.span();
    let n = blade.n();
    let mut points = DMatrix::zeros(spans * n, 3);
    for i in 0..spans {
        let eta = if i + 1 == spans {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (spans - 1) as f64
        };
        let x = interpolate_section(blade, eta)?;
        for j in 0..n {
            let [a, b] = x.row(j);
            let r = i * n + j;
            points[(r, 0)] = a;
            points[(r, 1)] = b;
            points[(r, 2)] = eta;
        }
    }
    Ok(Wireframe { spans, n, points })
}
