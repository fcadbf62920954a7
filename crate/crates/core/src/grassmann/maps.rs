use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use super::{GrassmannError, GrassmannPoint, TangentVector};
use crate::linalg::{self, orthonormalize, thin_svd};

/// Largest allowed `‖PᵀΔ‖_F` for a tangent vector.
pub const TANGENCY_TOL: f64 = 1e-8;

/// Log is refused once the largest principal angle reaches `π/2 − margin`.
pub const CUT_LOCUS_MARGIN: f64 = 1e-8;

/// Principal angles between `[P]` and `[Q]`, ascending, in `[0, π/2]`.
pub fn principal_angles(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<Vec<f64>, GrassmannError> {
    p.check_same_dims(q)?;
    Ok(linalg::principal_angles(p.rep(), q.rep()))
}

/// Geodesic distance `sqrt(Σ θᵢ²)`.
pub fn distance(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64, GrassmannError> {
    Ok(principal_angles(p, q)?.iter().map(|t| t * t).sum::<f64>().sqrt())
}

fn diag_map(s: &DVector<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&s.map(f))
}

/// Riemannian logarithm: the horizontal `Δ` at `P` with `Exp_P(Δ) = [Q]`
/// and `‖Δ‖ = d(P, Q)`.
pub fn log_map(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<TangentVector, GrassmannError> {
    let angles = principal_angles(p, q)?;
    let largest = angles.last().copied().unwrap_or(0.0);
    if largest >= FRAC_PI_2 - CUT_LOCUS_MARGIN {
        return Err(GrassmannError::CutLocus { angle: largest });
    }
    let (pr, qr) = (p.rep(), q.rep());
    let c = pr.transpose() * qr;
    let c_inv = c.try_inverse().ok_or(GrassmannError::CutLocus { angle: largest })?;
    let residual = qr - pr * (pr.transpose() * qr);
    let l = residual * c_inv;
    let svd = thin_svd(&l);
    let delta = &svd.u * diag_map(&svd.s, f64::atan) * svd.v.transpose();
    // strip the roundoff-level vertical component
    let delta = &delta - pr * (pr.transpose() * &delta);
    Ok(TangentVector::from_parts(p.clone(), delta))
}

fn check_tangent(p: &GrassmannPoint, delta: &TangentVector) -> Result<(), GrassmannError> {
    if delta.mat().shape() != p.rep().shape() {
        return Err(GrassmannError::DimensionMismatch {
            expected: p.rep().shape(),
            got: delta.mat().shape(),
        });
    }
    let residual = (p.rep().transpose() * delta.mat()).norm();
    if !(residual <= TANGENCY_TOL) {
        return Err(GrassmannError::NotHorizontal { residual });
    }
    Ok(())
}

/// Unnormalized geodesic representative `P V cos(Σ) Vᵀ + U sin(Σ) Vᵀ`.
fn exp_raw(p: &DMatrix<f64>, delta: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = thin_svd(delta);
    let vt = svd.v.transpose();
    p * &svd.v * diag_map(&svd.s, f64::cos) * &vt + &svd.u * diag_map(&svd.s, f64::sin) * &vt
}

/// Riemannian exponential at `P`, re-orthonormalized by sign-fixed QR.
///
/// `Δ` is read as a horizontal matrix at `P`'s representative; its own
/// `base` field is not consulted.
pub fn exp_map(p: &GrassmannPoint, delta: &TangentVector) -> Result<GrassmannPoint, GrassmannError> {
    check_tangent(p, delta)?;
    Ok(GrassmannPoint::from_orthonormal(orthonormalize(&exp_raw(
        p.rep(),
        delta.mat(),
    ))))
}

/// `Exp_P(t · Log_P(Q))`.
pub fn geodesic_point(p: &GrassmannPoint, q: &GrassmannPoint, t: f64) -> Result<GrassmannPoint, GrassmannError> {
    let delta = log_map(p, q)?;
    exp_map(p, &delta.scaled(t))
}

/// Transports `w` along `t ↦ Exp_P(t·direction)` to parameter `t`. The
/// result is attached to the geodesic point `Exp_P(t·direction)`.
pub fn parallel_transport(
    p: &GrassmannPoint,
    direction: &TangentVector,
    w: &TangentVector,
    t: f64,
) -> Result<TangentVector, GrassmannError> {
    check_tangent(p, direction)?;
    check_tangent(p, w)?;
    let svd = thin_svd(direction.mat());
    let (u, v, s) = (&svd.u, &svd.v, &svd.s);
    let ut_w = u.transpose() * w.mat();
    let moved = -(p.rep() * v * diag_map(s, |x| (t * x).sin()) * &ut_w)
        + u * diag_map(s, |x| (t * x).cos()) * &ut_w
        + (w.mat() - u * &ut_w);
    let end = exp_map(p, &direction.scaled(t))?;
    // express at the orthonormalized end representative (they differ by a
    // roundoff-level triangular factor)
    let raw_end = exp_raw(p.rep(), &(direction.mat() * t));
    let g = raw_end.transpose() * end.rep();
    Ok(TangentVector::from_parts(end, moved * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn plane(n: usize, a: usize, b: usize) -> GrassmannPoint {
        let mut m = DMatrix::zeros(n, 2);
        m[(a, 0)] = 1.0;
        m[(b, 1)] = 1.0;
        GrassmannPoint::new(m).unwrap()
    }

    #[test]
    fn orthogonal_planes_distance() {
        let p = plane(4, 0, 1);
        let q = plane(4, 2, 3);
        let th = principal_angles(&p, &q).unwrap();
        assert!((th[0] - PI / 2.0).abs() < 1e-15 && (th[1] - PI / 2.0).abs() < 1e-15);
        assert!((distance(&p, &q).unwrap() - PI / 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(log_map(&p, &q), Err(GrassmannError::CutLocus { .. })));
        assert_eq!(distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn single_rotation_angle() {
        // rotate e1 toward e3 by 0.3
        let p = plane(5, 0, 1);
        let mut m = DMatrix::zeros(5, 2);
        m[(0, 0)] = 0.3f64.cos();
        m[(2, 0)] = 0.3f64.sin();
        m[(1, 1)] = 1.0;
        let q = GrassmannPoint::new(m).unwrap();
        assert!((distance(&p, &q).unwrap() - 0.3).abs() < 1e-15);
        let d = log_map(&p, &q).unwrap();
        assert!((d.mat()[(2, 0)] - 0.3).abs() < 1e-15);
        assert!((d.norm() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let p = plane(6, 1, 4);
        let e = exp_map(&p, &TangentVector::zero(&p)).unwrap();
        assert!((e.rep() - p.rep()).amax() < 1e-15);
    }

    #[test]
    fn exp_rejects_vertical_direction() {
        let p = plane(4, 0, 1);
        let mut m = DMatrix::zeros(4, 2);
        m[(0, 0)] = 0.5;
        let err = exp_map(&p, &TangentVector::from_parts(p.clone(), m)).unwrap_err();
        assert!(matches!(err, GrassmannError::NotHorizontal { .. }));
        assert!(TangentVector::new(&p, DMatrix::identity(4, 2)).is_err());
    }

    #[test]
    fn transport_at_zero_time_is_identity() {
        let p = plane(5, 0, 1);
        let mut d = DMatrix::zeros(5, 2);
        d[(2, 0)] = 0.4;
        d[(3, 1)] = -0.2;
        let mut w = DMatrix::zeros(5, 2);
        w[(4, 0)] = 1.0;
        w[(2, 1)] = 0.5;
        let dir = TangentVector::new(&p, d).unwrap();
        let w = TangentVector::new(&p, w).unwrap();
        let moved = parallel_transport(&p, &dir, &w, 0.0).unwrap();
        assert!((moved.mat() - w.mat()).amax() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let p = plane(4, 0, 1);
        let q = plane(5, 0, 1);
        assert!(matches!(
            distance(&p, &q),
            Err(GrassmannError::DimensionMismatch { .. })
        ));
    }
}
