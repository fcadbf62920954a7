use nalgebra::Matrix2;

use super::GrassmannPoint;
use crate::linalg::{thin_svd, to_matrix2};

/// Rotation `R ∈ SO(2)` minimizing `‖P − Q·R‖_F`.
///
/// From the SVD `QᵀP = U S Vᵀ`, `R = U diag(1, det(UVᵀ)) Vᵀ`. Reflections
/// are excluded since they swap the upper and lower surfaces.
pub fn procrustes_rotation(p: &GrassmannPoint, q: &GrassmannPoint) -> Matrix2<f64> {
    assert_eq!(p.q(), 2, "procrustes_rotation needs 2-column representatives");
    assert_eq!(
        p.rep().shape(),
        q.rep().shape(),
        "representatives must have equal shape"
    );
    let cross = q.rep().transpose() * p.rep();
    let svd = thin_svd(&cross);
    let u = to_matrix2(&svd.u);
    let v = to_matrix2(&svd.v);
    let d = (u * v.transpose()).determinant().signum();
    u * Matrix2::new(1.0, 0.0, 0.0, d) * v.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_matrix2;
    use nalgebra::DMatrix;

    fn rot(a: f64) -> Matrix2<f64> {
        let (s, c) = a.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    fn sample() -> GrassmannPoint {
        GrassmannPoint::new(DMatrix::from_row_slice(
            5,
            2,
            &[1.0, 0.1, 0.4, 0.5, -0.3, 0.2, -1.0, -0.4, 0.2, -0.6],
        ))
        .unwrap()
    }

    #[test]
    fn self_alignment_is_identity() {
        let p = sample();
        assert!((procrustes_rotation(&p, &p) - Matrix2::identity()).amax() < 1e-14);
    }

    #[test]
    fn planted_rotation_recovered() {
        let p = sample();
        let r0 = rot(1.1);
        let q = p.rotated(&from_matrix2(&r0));
        let r = procrustes_rotation(&p, &q);
        assert!((r - r0.transpose()).amax() < 1e-14);
        let residual = (p.rep() - q.rep() * from_matrix2(&r)).norm();
        assert!(residual < 1e-12);
    }

    #[test]
    fn result_is_proper_rotation_even_for_reflected_input() {
        let p = sample();
        let flip = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let q = p.rotated(&flip);
        let r = procrustes_rotation(&p, &q);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
        assert!((r.transpose() * r - Matrix2::identity()).amax() < 1e-14);
    }
}
