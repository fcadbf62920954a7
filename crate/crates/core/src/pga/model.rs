use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::PgaError;
use crate::geometry::AffineMap;
use crate::grassmann::{exp_map, log_map, GrassmannPoint, TangentVector};

/// Tangent matrices are flattened column by column (all first-coordinate
/// entries over the landmarks, then all second-coordinate entries).
pub const FLATTEN_ORDER: &str = "column-major";

/// Eigenvalues below this fraction of the largest are treated as zero
/// when building basis directions from the data.
const NULL_REL_TOL: f64 = 1e-13;
const LAMBDA_FLOOR: f64 = 1e-30;

/// Containment region for normal coordinates: the axis-aligned bounding box
/// of the training data and an axis-aligned ellipsoid with semi-axes
/// `radii`.
#[derive(Debug, Clone, PartialEq)]
pub struct PgaDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PgaModel {
    pub mean: GrassmannPoint,
    /// Orthonormal (trace metric) principal directions at `mean`.
    pub basis: Vec<TangentVector>,
    /// Leading `r` eigenvalues, non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Every eigenvalue of the Log covariance that the data can support
    /// (`min(N, n·q)` values), non-increasing.
    pub spectrum: Vec<f64>,
    pub domain: PgaDomain,
    /// `N × r` normal coordinates of the training shapes.
    pub training_coords: DMatrix<f64>,
    /// Affine map used to render synthesized shapes in physical units.
    pub reference_affine: Option<AffineMap>,
}

impl PgaModel {
    pub fn r(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.mean.n()
    }

    /// `λ_{k+1} / λ_k` over the stored spectrum.
    pub fn decay_ratios(&self) -> Vec<f64> {
        self.spectrum
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }

    /// `Σⱼ tⱼ uⱼ` at the mean.
    pub fn tangent(&self, t: &[f64]) -> Result<TangentVector, PgaError> {
        if t.len() != self.r() {
            return Err(PgaError::CoordinateLength {
                expected: self.r(),
                got: t.len(),
            });
        }
        let mut v = TangentVector::zero(&self.mean);
        for (tj, uj) in t.iter().zip(&self.basis) {
            v = v.add_scaled(uj, *tj);
        }
        Ok(v)
    }
}

fn build_domain(coords: &DMatrix<f64>, eigenvalues: &[f64]) -> PgaDomain {
    let r = eigenvalues.len();
    let mut lower = vec![0.0; r];
    let mut upper = vec![0.0; r];
    for j in 0..r {
        let col = coords.column(j);
        lower[j] = col.min();
        upper[j] = col.max();
    }
    let max_radius = coords
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(eigenvalues)
                .map(|(t, l)| t * t / l.max(LAMBDA_FLOOR))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let radii = eigenvalues
        .iter()
        .map(|l| 1.1 * max_radius * l.max(LAMBDA_FLOOR).sqrt())
        .collect();
    PgaDomain { lower, upper, radii }
}

fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

fn unflatten(v: &DVector<f64>, n: usize, q: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, q, v.as_slice())
}

/// Sign convention: the largest-magnitude entry is positive.
fn fix_sign(v: &mut DVector<f64>) {
    let idx = v.iamax();
    if v[idx] < 0.0 {
        v.neg_mut();
    }
}

/// Eigenpairs sorted by non-increasing eigenvalue.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    (values, vectors)
}

/// Completes `basis` to `r` orthonormal horizontal vectors using projected
/// canonical directions; only needed when the data do not span `r`
/// directions.
fn complete_basis(mean: &GrassmannPoint, basis: &mut Vec<DVector<f64>>, r: usize) {
    let (n, q) = (mean.n(), mean.q());
    let p = mean.rep();
    let mut k = 0;
    while basis.len() < r && k < n * q {
        let mut e = DMatrix::zeros(n, q);
        e[(k % n, k / n)] = 1.0;
        k += 1;
        let h = &e - p * (p.transpose() * &e);
        let mut v = flatten(&h);
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            v /= norm;
            fix_sign(&mut v);
            basis.push(v);
        }
    }
}

/// Principal geodesic analysis at `mean`.
///
/// Log vectors are flattened (see [`FLATTEN_ORDER`]) and the uncentered
/// covariance `(1/N) Σ vᵢvᵢᵀ` is eigendecomposed, through the `N × N` Gram
/// matrix when `N` is smaller than the flattened dimension.
pub fn pga_fit(shapes: &[GrassmannPoint], mean: &GrassmannPoint, r: usize) -> Result<PgaModel, PgaError> {
    let big_n = shapes.len();
    if big_n == 0 {
        return Err(PgaError::Empty);
    }
    let (n, q) = (mean.n(), mean.q());
    let manifold_dim = q * (n - q);
    let max_r = big_n.min(manifold_dim);
    if r == 0 || r > max_r {
        return Err(PgaError::Dimension { r, max: max_r });
    }
    let dim = n * q;
    let mut data = DMatrix::zeros(dim, big_n);
    for (i, s) in shapes.iter().enumerate() {
        let v = log_map(mean, s)?;
        data.set_column(i, &flatten(v.mat()));
    }
    let inv_n = 1.0 / big_n as f64;

    let (mut spectrum, mut directions): (Vec<f64>, Vec<DVector<f64>>) = if big_n < dim {
        let gram = data.transpose() * &data * inv_n;
        let (values, vectors) = sorted_eigen(gram);
        let top = values[0];
        let dirs = values
            .iter()
            .take(r)
            .enumerate()
            .take_while(|(_, &l)| l > NULL_REL_TOL * top && l > 0.0)
            .map(|(j, &l)| {
                let mut u = &data * vectors.column(j) / (l * big_n as f64).sqrt();
                u /= u.norm();
                fix_sign(&mut u);
                u
            })
            .collect();
        (values, dirs)
    } else {
        let cov = &data * data.transpose() * inv_n;
        let (values, vectors) = sorted_eigen(cov);
        let top = values[0];
        let dirs = values
            .iter()
            .take(r)
            .enumerate()
            .take_while(|(_, &l)| l > NULL_REL_TOL * top && l > 0.0)
            .map(|(j, _)| {
                let mut u = vectors.column(j).into_owned();
                fix_sign(&mut u);
                u
            })
            .collect();
        (values, dirs)
    };
    spectrum.truncate(max_r);
    complete_basis(mean, &mut directions, r);

    let basis: Vec<TangentVector> = directions
        .iter()
        .map(|u| TangentVector::project(mean, &unflatten(u, n, q)))
        .collect::<Result<_, _>>()?;
    let eigenvalues: Vec<f64> = spectrum[..r].to_vec();
    let training_coords = DMatrix::from_fn(big_n, r, |i, j| data.column(i).dot(&directions[j]));
    let domain = build_domain(&training_coords, &eigenvalues);
    Ok(PgaModel {
        mean: mean.clone(),
        basis,
        eigenvalues,
        spectrum,
        domain,
        training_coords,
        reference_affine: None,
    })
}

/// Normal coordinates `tⱼ = ⟨uⱼ, Log_mean(shape)⟩`.
pub fn coords_of(model: &PgaModel, shape: &GrassmannPoint) -> Result<Vec<f64>, PgaError> {
    let v = log_map(&model.mean, shape)?;
    Ok(model.basis.iter().map(|u| u.inner(&v)).collect())
}

/// `Exp_mean(Σⱼ tⱼ uⱼ)`. Coordinates outside the domain are allowed.
pub fn synthesize(model: &PgaModel, t: &[f64]) -> Result<GrassmannPoint, PgaError> {
    let v = model.tangent(t)?;
    Ok(exp_map(&model.mean, &v)?)
}

/// Whether `t` lies in the stored ellipsoid.
pub fn domain_contains(model: &PgaModel, t: &[f64]) -> bool {
    if t.len() != model.r() {
        return false;
    }
    let s: f64 = t
        .iter()
        .zip(&model.domain.radii)
        .map(|(x, a)| {
            if *a > 0.0 {
                (x / a).powi(2)
            } else if *x == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .sum();
    s <= 1.0
}
