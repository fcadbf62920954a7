use nalgebra::Matrix2;

use crate::grassmann::{procrustes_rotation, GrassmannPoint};
use crate::linalg::from_matrix2;

/// Sequential Procrustes alignment of representatives.
///
/// With `tip_to_hub`, the last point is kept and each earlier point is
/// rotated onto its already aligned successor; otherwise the first point is
/// kept and alignment runs forward. Returns the aligned points and the
/// rotation applied to each (`aligned[k] = points[k]·R[k]`). Subspaces are
/// unchanged.
pub fn procrustes_cluster(points: &[GrassmannPoint], tip_to_hub: bool) -> (Vec<GrassmannPoint>, Vec<Matrix2<f64>>) {
    let n = points.len();
    let mut aligned = points.to_vec();
    let mut rotations = vec![Matrix2::identity(); n];
    if n < 2 {
        return (aligned, rotations);
    }
    let order: Vec<(usize, usize)> = if tip_to_hub {
        (0..n - 1).rev().map(|k| (k, k + 1)).collect()
    } else {
        (1..n).map(|k| (k, k - 1)).collect()
    };
    for (k, reference) in order {
        let r = procrustes_rotation(&aligned[reference], &points[k]);
        aligned[k] = points[k].rotated(&from_matrix2(&r));
        rotations[k] = r;
    }
    (aligned, rotations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::distance;
    use nalgebra::DMatrix;

    fn rot(a: f64) -> DMatrix<f64> {
        let (s, c) = a.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
    }

    fn base() -> GrassmannPoint {
        GrassmannPoint::new(DMatrix::from_fn(9, 2, |i, j| ((i * 5 + j * 11) as f64 * 0.41).cos())).unwrap()
    }

    #[test]
    fn identical_points_need_no_rotation() {
        let p = base();
        let (_, rs) = procrustes_cluster(&[p.clone(), p.clone(), p], true);
        for r in rs {
            assert!((r - Matrix2::identity()).amax() < 1e-14);
        }
    }

    #[test]
    fn planted_rotations_are_removed() {
        let p = base();
        let pts: Vec<GrassmannPoint> = [0.3, -1.2, 2.5, 0.9].iter().map(|a| p.rotated(&rot(*a))).collect();
        let (aligned, _) = procrustes_cluster(&pts, true);
        for w in aligned.windows(2) {
            assert!((w[0].rep() - w[1].rep()).norm() < 1e-10);
        }
        for (a, b) in aligned.iter().zip(&pts) {
            assert!(distance(a, b).unwrap() < 1e-12);
        }
        assert_eq!(aligned[3].rep(), pts[3].rep());
    }

    #[test]
    fn forward_direction_keeps_first() {
        let p = base();
        let pts: Vec<GrassmannPoint> = [0.3, -1.2].iter().map(|a| p.rotated(&rot(*a))).collect();
        let (aligned, _) = procrustes_cluster(&pts, false);
        assert_eq!(aligned[0].rep(), pts[0].rep());
        assert!((aligned[1].rep() - pts[0].rep()).norm() < 1e-10);
    }
}
