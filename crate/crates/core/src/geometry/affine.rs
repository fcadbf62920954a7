use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::{GeometryError, LandmarkMatrix};
use crate::linalg::mul_right2;

/// Smallest admissible `|det M|`.
pub const DET_TOL: f64 = 1e-12;

/// Affine deformation acting on the right: `X ↦ X·M + 1·diag(b)`.
///
/// Every row `x` of `X` maps to `Mᵀx + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    linear: Matrix2<f64>,
    translation: Vector2<f64>,
}

impl AffineMap {
    pub fn new(linear: Matrix2<f64>, translation: Vector2<f64>) -> Result<Self, GeometryError> {
        let det = linear.determinant();
        if !(det.abs() > DET_TOL) || linear.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(GeometryError::NotInvertible { det });
        }
        Ok(Self { linear, translation })
    }

    pub fn identity() -> Self {
        Self {
            linear: Matrix2::identity(),
            translation: Vector2::zeros(),
        }
    }

    pub fn linear(&self) -> &Matrix2<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &Vector2<f64> {
        &self.translation
    }

    /// The map "apply `self`, then `then`": `(M₁M₂, b₁M₂ + b₂)` with `b` as a
    /// row vector.
    pub fn then(&self, then: &AffineMap) -> AffineMap {
        AffineMap {
            linear: self.linear * then.linear,
            translation: then.linear.transpose() * self.translation + then.translation,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self
            .linear
            .try_inverse()
            .expect("AffineMap linear part is invertible by construction");
        AffineMap {
            linear: inv,
            translation: -(inv.transpose() * self.translation),
        }
    }

    /// Components in the order `M₁₁, M₁₂, M₂₁, M₂₂, b₁, b₂`.
    pub fn components(&self) -> [f64; 6] {
        [
            self.linear[(0, 0)],
            self.linear[(0, 1)],
            self.linear[(1, 0)],
            self.linear[(1, 1)],
            self.translation[0],
            self.translation[1],
        ]
    }

    pub fn from_components(c: [f64; 6]) -> Result<Self, GeometryError> {
        Self::new(Matrix2::new(c[0], c[1], c[2], c[3]), Vector2::new(c[4], c[5]))
    }
}

/// The four physically meaningful one-parameter subgroups through GL2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffineKind {
    Thickness,
    Camber,
    Chord,
    Twist,
}

impl std::str::FromStr for AffineKind {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "thickness" => Ok(Self::Thickness),
            "camber" => Ok(Self::Camber),
            "chord" => Ok(Self::Chord),
            "twist" => Ok(Self::Twist),
            other => Err(GeometryError::Parameter(format!("unknown affine kind `{other}`"))),
        }
    }
}

/// Linear part `M_t` of the subgroup `kind` at `t ∈ (0, 1)`, zero translation.
pub fn affine_subgroup(kind: AffineKind, t: f64) -> Result<AffineMap, GeometryError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(GeometryError::Domain { t });
    }
    let linear = match kind {
        AffineKind::Thickness => Matrix2::new(1.0, 0.0, 0.0, t),
        AffineKind::Camber => Matrix2::new(2.0 * (1.0 - t), 0.0, 0.0, 2.0 * t),
        AffineKind::Chord => Matrix2::new(t, 0.0, 0.0, 1.0),
        AffineKind::Twist => {
            let (s, c) = (t * FRAC_PI_2).sin_cos();
            Matrix2::new(c, -s, s, c)
        }
    };
    AffineMap::new(linear, Vector2::zeros())
}

/// `X·M + 1·diag(b)`.
pub fn affine_apply(x: &LandmarkMatrix, a: &AffineMap) -> LandmarkMatrix {
    let mut out = mul_right2(x.points(), &a.linear);
    for mut row in out.row_iter_mut() {
        row[0] += a.translation[0];
        row[1] += a.translation[1];
    }
    LandmarkMatrix::new(out).expect("affine image of a valid landmark matrix is valid")
}
