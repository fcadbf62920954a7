//! Physical airfoil geometry: landmark matrices, CST synthesis, affine
//! deformations, validity diagnostics and the perturbation dataset.

mod affine;
mod cst;
mod dataset;
mod validate;

pub use affine::{affine_apply, affine_subgroup, AffineKind, AffineMap};
pub use cst::{
    cosine_stations, cst_bounding_box, cst_evaluate, cst_sweep, perturb_cst, CstParams, CST_COEFFS, CST_N1, CST_N2,
};
pub use dataset::{gen_dataset, synthetic_baselines, Dataset, DatasetEntry, PerturbationPlan, DEFAULT_LANDMARKS};
pub use validate::{validate_shape, ShapeDiagnostics, RANK_TOL};

use nalgebra::{DMatrix, Vector2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid sampling: landmark count {n} must be odd and at least 7")]
    InvalidSampling { n: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("subgroup parameter t = {t} outside (0, 1)")]
    Domain { t: f64 },
    #[error("linear part is not in GL2 (det = {det:e})")]
    NotInvertible { det: f64 },
    #[error("landmark matrix must be n x 2 with n >= 3 (got {rows} x {cols})")]
    BadShape { rows: usize, cols: usize },
    #[error("landmark matrix contains non-finite values")]
    NonFinite,
    #[error("shape {index} rejected after {attempts} resampling attempts")]
    Rejected { index: usize, attempts: usize },
}

/// Ordered `n × 2` boundary landmarks of a planar shape, one row per point.
///
/// Rows run trailing edge → upper surface → leading edge → lower surface →
/// trailing edge. Rank is not enforced on construction so degenerate inputs
/// can still be inspected with [`validate_shape`]; operations that need full
/// rank check it themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkMatrix {
    points: DMatrix<f64>,
}

impl LandmarkMatrix {
    pub fn new(points: DMatrix<f64>) -> Result<Self, GeometryError> {
        if points.ncols() != 2 || points.nrows() < 3 {
            return Err(GeometryError::BadShape {
                rows: points.nrows(),
                cols: points.ncols(),
            });
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[[f64; 2]]) -> Result<Self, GeometryError> {
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(DMatrix::from_row_slice(rows.len(), 2, &flat))
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.points
    }

    pub fn row(&self, i: usize) -> [f64; 2] {
        [self.points[(i, 0)], self.points[(i, 1)]]
    }

    pub fn rows(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.n()).map(move |i| self.row(i))
    }

    pub fn centroid(&self) -> Vector2<f64> {
        let n = self.n() as f64;
        Vector2::new(self.points.column(0).sum() / n, self.points.column(1).sum() / n)
    }

    /// `σ₂ / σ₁` of the centered landmarks; 0 for a collapsed shape.
    pub fn rank_ratio(&self) -> f64 {
        let c = self.centroid();
        let centered = DMatrix::from_fn(self.n(), 2, |i, j| self.points[(i, j)] - c[j]);
        let s = centered.singular_values();
        let (hi, lo) = if s[0] >= s[1] { (s[0], s[1]) } else { (s[1], s[0]) };
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank_ratio() > RANK_TOL
    }
}
