//! Small dense helpers shared by the manifold code. All matrices are
//! `DMatrix<f64>`; the 2×2 affine blocks use `Matrix2<f64>`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2, SVD};

/// Entries below this magnitude are treated as zero when picking the sign
/// of a singular vector.
const SIGN_EPS: f64 = 1e-12;

/// Thin SVD `A = U diag(s) Vᵀ` with singular values sorted non-increasing
/// and the sign of each `V` column fixed so its leading nonzero entry is
/// positive (the same flip is applied to `U`).
#[derive(Debug, Clone)]
pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn thin_svd(a: &DMatrix<f64>) -> ThinSvd {
    let k = a.nrows().min(a.ncols());
    let (u_raw, s_raw, v_raw) = if a.ncols() == 2 && a.nrows() >= 2 {
        two_column_svd(a)
    } else {
        let svd = SVD::new(a.clone(), true, true);
        let u = svd.u.expect("u requested");
        let v = svd.v_t.expect("v_t requested").transpose();
        (u, svd.singular_values, v)
    };

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s_raw[j].total_cmp(&s_raw[i]));

    let mut u = DMatrix::zeros(a.nrows(), k);
    let mut v = DMatrix::zeros(a.ncols(), k);
    let mut s = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let v_col = v_raw.column(src);
        let flip = v_col.iter().find(|x| x.abs() > SIGN_EPS).is_some_and(|x| *x < 0.0);
        let sign = if flip { -1.0 } else { 1.0 };
        u.set_column(dst, &(u_raw.column(src) * sign));
        v.set_column(dst, &(v_col * sign));
        s[dst] = s_raw[src];
    }
    ThinSvd { u, s, v }
}

/// SVD of an `m × 2` matrix as Householder QR followed by one exact
/// one-sided Jacobi rotation of the 2×2 factor. `U` stays orthonormal even
/// when a singular value vanishes (the general-purpose routine loses
/// accuracy on nearly rank-one inputs).
fn two_column_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let qr = a.clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let (c0, c1) = (Vector2::new(r[(0, 0)], r[(1, 0)]), Vector2::new(r[(0, 1)], r[(1, 1)]));
    let (alpha, beta, gamma) = (c0.norm_squared(), c1.norm_squared(), c0.dot(&c1));
    let (cs, sn) = if gamma == 0.0 {
        (1.0, 0.0)
    } else {
        let zeta = (beta - alpha) / (2.0 * gamma);
        let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
        let cs = 1.0 / (1.0 + t * t).sqrt();
        (cs, cs * t)
    };
    let mut rv = Matrix2::new(cs, sn, -sn, cs);
    let mut w0 = c0 * cs - c1 * sn;
    let mut w1 = c0 * sn + c1 * cs;
    if w1.norm() > w0.norm() {
        std::mem::swap(&mut w0, &mut w1);
        rv.swap_columns(0, 1);
    }
    let s0 = w0.norm();
    let u0 = if s0 > 0.0 { w0 / s0 } else { Vector2::new(1.0, 0.0) };
    let u1 = Vector2::new(-u0[1], u0[0]);
    let mut s1 = u1.dot(&w1);
    if s1 < 0.0 {
        s1 = -s1;
        rv.column_mut(1).neg_mut();
    }
    let ur = Matrix2::from_columns(&[u0, u1]);
    let u = mul_right2(&q, &ur);
    (u, DVector::from_vec(vec![s0, s1]), from_matrix2(&rv))
}

/// Orthonormal basis of the column space via thin QR, with column signs
/// chosen so the triangular factor has a non-negative diagonal. For an
/// input that is already orthonormal this is the identity up to roundoff.
pub(crate) fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `A · M` for an `n × 2` matrix `A`.
pub(crate) fn mul_right2(a: &DMatrix<f64>, m: &Matrix2<f64>) -> DMatrix<f64> {
    debug_assert_eq!(a.ncols(), 2);
    DMatrix::from_fn(a.nrows(), 2, |i, j| a[(i, 0)] * m[(0, j)] + a[(i, 1)] * m[(1, j)])
}

pub(crate) fn to_matrix2(a: &DMatrix<f64>) -> Matrix2<f64> {
    debug_assert_eq!(a.shape(), (2, 2));
    Matrix2::new(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])
}

pub(crate) fn from_matrix2(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

/// Orthogonal polar factor of a 2×2 matrix (`W` in `A = W H`, `H` SPD).
pub(crate) fn polar_factor(a: &Matrix2<f64>) -> Matrix2<f64> {
    let svd = a.svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

/// Principal angles (ascending) between the column spaces of two
/// orthonormal `n × k` frames.
///
/// Cosines come from the singular values of `PᵀQ`, sines from the norms of
/// the matching columns of `(I − PPᵀ)QZ`; pairing them through `atan2`
/// keeps small angles accurate where `arccos` alone would lose half the
/// digits.
pub(crate) fn principal_angles(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Vec<f64> {
    let c = p.transpose() * q;
    let svd = thin_svd(&c);
    let qz = q * &svd.v;
    let residual = &qz - p * (p.transpose() * &qz);
    let mut angles: Vec<f64> = (0..svd.s.len())
        .map(|i| {
            let cos = svd.s[i].clamp(0.0, 1.0);
            let sin = residual.column(i).norm();
            sin.atan2(cos)
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
}

/// Frobenius inner product `tr(AᵀB)`.
pub(crate) fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
