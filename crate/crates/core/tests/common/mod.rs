#![allow(dead_code)]

use grassfoil::grassmann::{GrassmannPoint, TangentVector};
use nalgebra::{DMatrix, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn random_point(rng: &mut impl Rng, n: usize) -> GrassmannPoint {
    GrassmannPoint::new(gaussian(rng, n, 2)).unwrap()
}

/// Horizontal vector at `p` with Gaussian entries before projection.
pub fn random_tangent(rng: &mut impl Rng, p: &GrassmannPoint) -> TangentVector {
    TangentVector::project(p, &gaussian(rng, p.n(), 2)).unwrap()
}

/// Horizontal vector at `p` whose largest singular value (the largest
/// principal angle it opens) is `angle`.
pub fn tangent_with_angle(rng: &mut impl Rng, p: &GrassmannPoint, angle: f64) -> TangentVector {
    let v = random_tangent(rng, p);
    let top = v.mat().clone().singular_values().max();
    v.scaled(angle / top)
}

/// Invertible 2×2 matrix with `|det| ≥ 0.1`.
pub fn random_gl2(rng: &mut impl Rng) -> Matrix2<f64> {
    loop {
        let m = Matrix2::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        if m.determinant().abs() >= 0.1 {
            return m;
        }
    }
}

pub fn random_translation(rng: &mut impl Rng) -> Vector2<f64> {
    Vector2::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Column-major flattening of a tangent matrix.
pub fn flatten(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns, from the sine (accurate for tiny angles).
pub fn largest_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let residual = a - b * (b.transpose() * a);
    residual.singular_values().max().min(1.0).asin()
}
