//! Grassmannian shape representation for airfoils and wind turbine blades.
//!
//! A planar airfoil sampled at `n` ordered landmarks is an `n × 2` matrix `X`.
//! Landmark-affine (LA) standardization splits it into an orthonormal
//! representative `X̃` of a point on the Grassmannian `G(n, 2)` and an affine
//! map `(M, b)` with `X = X̃ M + 1 diag(b)`. Everything that varies under
//! thickness, camber, chord, twist and translation lives in `(M, b)`; the
//! remaining "shape" lives on the manifold.
//!
//! The crate is organized as:
//!
//! - [`geometry`]: landmark matrices, CST airfoil synthesis, affine maps,
//!   shape validity diagnostics and dataset generation.
//! - [`grassmann`]: LA standardization and the Riemannian toolkit on
//!   `G(n, 2)` (exp, log, geodesics, distance, parallel transport, Procrustes).
//! - [`pga`]: Karcher mean, principal geodesic analysis and the
//!   low-dimensional design space built from it.
//! - [`blade`]: Procrustes clustering, piecewise-geodesic blade interpolation
//!   and consistent blade perturbations.
//! - [`io`]: deterministic text formats for coordinates, models and blades.

// `!(a > b)` is used on purpose so NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blade;
pub mod geometry;
pub mod grassmann;
pub mod io;
pub(crate) mod linalg;
pub mod pga;

pub use blade::{BladeDefinition, BladeError, BladeStation};
pub use geometry::{AffineMap, CstParams, GeometryError, LandmarkMatrix, ShapeDiagnostics};
pub use grassmann::{GrassmannError, GrassmannPoint, LaDecomposition, TangentVector};
pub use io::IoError;
pub use pga::{PgaError, PgaModel};
