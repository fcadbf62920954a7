//! Karcher mean, principal geodesic analysis and the `r`-dimensional
//! design submanifold `{ Exp_mean(Σ tⱼ uⱼ) : t ∈ U }`.

mod karcher;
mod model;
mod sweep;

pub use karcher::{karcher_mean, KarcherMean, DEFAULT_KARCHER_TOL, DEFAULT_MAX_ITER};
pub use model::{coords_of, domain_contains, pga_fit, synthesize, PgaDomain, PgaModel, FLATTEN_ORDER};
pub use sweep::{corner_sweep, mean_affine, random_corner_pairs, sweep_diagnostics};

use thiserror::Error;

use crate::grassmann::GrassmannError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PgaError {
    #[error("at least one shape is required")]
    Empty,
    #[error("Karcher iteration did not converge in {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },
    #[error("requested rank {r} exceeds the admissible maximum {max}")]
    Dimension { r: usize, max: usize },
    #[error("coordinate vector has length {got}, model rank is {expected}")]
    CoordinateLength { expected: usize, got: usize },
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}
