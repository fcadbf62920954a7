//! Landmark-affine standardization and Riemannian geometry on `G(n, 2)`.
//!
//! Points are stored as orthonormal `n × q` representatives; two
//! representatives of the same subspace differ by a `q × q` orthogonal right
//! factor. Tangent vectors are horizontal (`Pᵀ Δ = 0`) and carry the
//! representative they were built at. The metric is `⟨A, B⟩ = tr(AᵀB)`.
//!
//! Exp, Log and parallel transport use the closed forms for orthonormal
//! representatives:
//!
//! ```text
//! Exp_P(Δ)   = P V cos(Σ) Vᵀ + U sin(Σ) Vᵀ,             Δ = U Σ Vᵀ
//! Log_P(Q)   = U atan(Σ) Vᵀ,     (I − PPᵀ) Q (PᵀQ)⁻¹ = U Σ Vᵀ
//! τ_t(W)     = (−P V sin(tΣ) Uᵀ + U cos(tΣ) Uᵀ + I − UUᵀ) W
//! ```

mod maps;
mod procrustes;
mod standardize;

pub use maps::{
    distance, exp_map, geodesic_point, log_map, parallel_transport, principal_angles, CUT_LOCUS_MARGIN, TANGENCY_TOL,
};
pub use procrustes::procrustes_rotation;
pub use standardize::{la_reconstruct, la_standardize, LaDecomposition};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::linalg::{frobenius_dot, orthonormalize};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrassmannError {
    #[error("degenerate shape: singular value ratio {ratio:e} is not full rank")]
    DegenerateShape { ratio: f64 },
    #[error("points are at the cut locus (largest principal angle {angle})")]
    CutLocus { angle: f64 },
    #[error("matrix is not horizontal at the base point (|PᵀΔ| = {residual:e})")]
    NotHorizontal { residual: f64 },
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("representative must have full column rank")]
    RankDeficient,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A point of `G(n, q)` held by an orthonormal representative.
#[derive(Debug, Clone)]
pub struct GrassmannPoint {
    rep: DMatrix<f64>,
}

impl GrassmannPoint {
    /// Orthonormalizes `rep` (thin QR with a non-negative triangular
    /// diagonal) and wraps it.
    pub fn new(rep: DMatrix<f64>) -> Result<Self, GrassmannError> {
        if rep.ncols() == 0 || rep.nrows() <= rep.ncols() || rep.iter().any(|v| !v.is_finite()) {
            return Err(GrassmannError::RankDeficient);
        }
        let q = orthonormalize(&rep);
        let gram = q.transpose() * &q;
        if (gram - DMatrix::identity(q.ncols(), q.ncols())).amax() > 1e-10 {
            return Err(GrassmannError::RankDeficient);
        }
        // QR of a rank-deficient input still yields an orthonormal Q; reject
        // it through the triangular factor instead
        let r = q.transpose() * &rep;
        let scale = rep.norm();
        if (0..r.ncols()).any(|j| r[(j, j)].abs() <= 1e-12 * scale) {
            return Err(GrassmannError::RankDeficient);
        }
        Ok(Self { rep: q })
    }

    /// Wraps a matrix already known to have orthonormal columns.
    pub(crate) fn from_orthonormal(rep: DMatrix<f64>) -> Self {
        debug_assert!((rep.transpose() * &rep - DMatrix::identity(rep.ncols(), rep.ncols())).amax() < 1e-8);
        Self { rep }
    }

    pub fn rep(&self) -> &DMatrix<f64> {
        &self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.nrows()
    }

    pub fn q(&self) -> usize {
        self.rep.ncols()
    }

    /// Same subspace, representative multiplied on the right by the
    /// orthogonal `g`.
    pub fn rotated(&self, g: &DMatrix<f64>) -> Self {
        Self::from_orthonormal(&self.rep * g)
    }

    pub(crate) fn check_same_dims(&self, other: &Self) -> Result<(), GrassmannError> {
        if self.rep.shape() != other.rep.shape() {
            return Err(GrassmannError::DimensionMismatch {
                expected: self.rep.shape(),
                got: other.rep.shape(),
            });
        }
        Ok(())
    }
}

/// A horizontal tangent vector at a [`GrassmannPoint`] representative.
#[derive(Debug, Clone)]
pub struct TangentVector {
    mat: DMatrix<f64>,
    base: GrassmannPoint,
}

impl TangentVector {
    /// Fails if `mat` is not horizontal at `base` within [`TANGENCY_TOL`].
    pub fn new(base: &GrassmannPoint, mat: DMatrix<f64>) -> Result<Self, GrassmannError> {
        if mat.shape() != base.rep.shape() {
            return Err(GrassmannError::DimensionMismatch {
                expected: base.rep.shape(),
                got: mat.shape(),
            });
        }
        let residual = (base.rep.transpose() * &mat).norm();
        if !(residual <= TANGENCY_TOL) {
            return Err(GrassmannError::NotHorizontal { residual });
        }
        Ok(Self {
            mat,
            base: base.clone(),
        })
    }

    /// Horizontal projection `(I − PPᵀ) mat`.
    pub fn project(base: &GrassmannPoint, mat: &DMatrix<f64>) -> Result<Self, GrassmannError> {
        if mat.shape() != base.rep.shape() {
            return Err(GrassmannError::DimensionMismatch {
                expected: base.rep.shape(),
                got: mat.shape(),
            });
        }
        let p = &base.rep;
        Ok(Self {
            mat: mat - p * (p.transpose() * mat),
            base: base.clone(),
        })
    }

    pub fn zero(base: &GrassmannPoint) -> Self {
        Self {
            mat: DMatrix::zeros(base.n(), base.q()),
            base: base.clone(),
        }
    }

    pub(crate) fn from_parts(base: GrassmannPoint, mat: DMatrix<f64>) -> Self {
        Self { mat, base }
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn base(&self) -> &GrassmannPoint {
        &self.base
    }

    /// `tr(AᵀB)`.
    pub fn inner(&self, other: &TangentVector) -> f64 {
        frobenius_dot(&self.mat, &other.mat)
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mat: &self.mat * t,
            base: self.base.clone(),
        }
    }

    /// `self + t·other`; both must live at the same representative.
    pub fn add_scaled(&self, other: &TangentVector, t: f64) -> Self {
        debug_assert_eq!(self.mat.shape(), other.mat.shape());
        Self {
            mat: &self.mat + &other.mat * t,
            base: self.base.clone(),
        }
    }

    /// Horizontality residual `‖PᵀΔ‖_F`.
    pub fn horizontality(&self) -> f64 {
        (self.base.rep.transpose() * &self.mat).norm()
    }

    /// Re-expresses the vector at another representative of the same
    /// subspace: with `new = base·G`, the vector becomes `Δ·G`.
    pub fn rebased(&self, new_base: &GrassmannPoint) -> Self {
        let g = self.base.rep.transpose() * &new_base.rep;
        Self {
            mat: &self.mat * g,
            base: new_base.clone(),
        }
    }
}
