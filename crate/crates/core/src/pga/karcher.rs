use nalgebra::DMatrix;

use super::PgaError;
use crate::grassmann::{exp_map, log_map, GrassmannPoint, TangentVector};

pub const DEFAULT_KARCHER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone)]
pub struct KarcherMean {
    pub point: GrassmannPoint,
    pub iterations: usize,
    /// Norm of the mean Log vector at `point`.
    pub residual: f64,
}

fn mean_log(mean: &GrassmannPoint, shapes: &[GrassmannPoint]) -> Result<TangentVector, PgaError> {
    let mut acc = DMatrix::zeros(mean.n(), mean.q());
    for s in shapes {
        acc += log_map(mean, s)?.mat();
    }
    acc /= shapes.len() as f64;
    Ok(TangentVector::project(mean, &acc)?)
}

/// Fixed-point iteration `μ ← Exp_μ(mean of Log_μ(Yᵢ))` with unit step,
/// started at `shapes[0]` and summed in input order.
pub fn karcher_mean(shapes: &[GrassmannPoint], tol: f64, max_iter: usize) -> Result<KarcherMean, PgaError> {
    let first = shapes.first().ok_or(PgaError::Empty)?;
    for s in &shapes[1..] {
        first.check_same_dims(s)?;
    }
    let mut mean = first.clone();
    let mut residual = f64::INFINITY;
    for iterations in 0..=max_iter {
        let step = mean_log(&mean, shapes)?;
        residual = step.norm();
        log::debug!("karcher iteration {iterations}: residual {residual:e}");
        if residual < tol {
            return Ok(KarcherMean {
                point: mean,
                iterations,
                residual,
            });
        }
        if iterations == max_iter {
            break;
        }
        mean = exp_map(&mean, &step)?;
    }
    Err(PgaError::IterationLimit {
        iterations: max_iter,
        residual,
    })
}
