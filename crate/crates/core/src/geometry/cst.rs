use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GeometryError, LandmarkMatrix};

/// Bernstein coefficients per surface (degree 8).
pub const CST_COEFFS: usize = 9;
/// Class-function exponents: `C(ψ) = ψ^N1 (1 − ψ)^N2`.
pub const CST_N1: f64 = 0.5;
pub const CST_N2: f64 = 1.0;

const BINOM8: [f64; CST_COEFFS] = [1.0, 8.0, 28.0, 56.0, 70.0, 56.0, 28.0, 8.0, 1.0];

/// Class-shape transformation parameters of one airfoil.
///
/// Upper and lower surface heights are `C(ψ)·S(ψ) ± ψ·te_thickness/2`, with
/// `S` the degree-8 Bernstein expansion of that surface's coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CstParams {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    #[serde(default)]
    pub te_thickness: f64,
}

impl CstParams {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>) -> Result<Self, GeometryError> {
        let p = Self {
            upper,
            lower,
            te_thickness: 0.0,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), GeometryError> {
        for (name, v) in [("upper", &self.upper), ("lower", &self.lower)] {
            if v.len() != CST_COEFFS {
                return Err(GeometryError::Parameter(format!(
                    "{name} surface needs {CST_COEFFS} coefficients, got {}",
                    v.len()
                )));
            }
            if v.iter().any(|a| !a.is_finite()) {
                return Err(GeometryError::Parameter(format!(
                    "{name} surface has non-finite coefficients"
                )));
            }
        }
        if !self.te_thickness.is_finite() {
            return Err(GeometryError::Parameter("non-finite te_thickness".into()));
        }
        Ok(())
    }

    /// The 18 free coefficients, upper surface first.
    pub fn coefficients(&self) -> Vec<f64> {
        self.upper.iter().chain(self.lower.iter()).copied().collect()
    }

    pub fn from_coefficients(c: &[f64], te_thickness: f64) -> Result<Self, GeometryError> {
        if c.len() != 2 * CST_COEFFS {
            return Err(GeometryError::Parameter(format!(
                "expected {} coefficients, got {}",
                2 * CST_COEFFS,
                c.len()
            )));
        }
        let p = Self {
            upper: c[..CST_COEFFS].to_vec(),
            lower: c[CST_COEFFS..].to_vec(),
            te_thickness,
        };
        p.check()?;
        Ok(p)
    }

    fn surface(coeffs: &[f64], psi: f64) -> f64 {
        let class = psi.powf(CST_N1) * (1.0 - psi).powf(CST_N2);
        let q = 1.0 - psi;
        let shape: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * BINOM8[i] * psi.powi(i as i32) * q.powi((CST_COEFFS - 1 - i) as i32))
            .sum();
        class * shape
    }

    pub fn upper_height(&self, psi: f64) -> f64 {
        Self::surface(&self.upper, psi) + 0.5 * psi * self.te_thickness
    }

    pub fn lower_height(&self, psi: f64) -> f64 {
        Self::surface(&self.lower, psi) - 0.5 * psi * self.te_thickness
    }
}

/// Cosine-spaced chord stations `ψ_j = (1 − cos(πj/m))/2`, `j = 0..=m`.
pub fn cosine_stations(m: usize) -> Vec<f64> {
    (0..=m)
        .map(|j| 0.5 * (1.0 - (PI * j as f64 / m as f64).cos()))
        .collect()
}

/// Samples the airfoil at `n = 2m + 1` landmarks: upper surface from the
/// trailing edge to the leading edge (`m + 1` points), then the lower
/// surface back to the trailing edge (`m` points).
pub fn cst_evaluate(params: &CstParams, n: usize) -> Result<LandmarkMatrix, GeometryError> {
    if n < 7 || n.is_multiple_of(2) {
        return Err(GeometryError::InvalidSampling { n });
    }
    params.check()?;
    let m = (n - 1) / 2;
    let psi = cosine_stations(m);
    let mut pts = DMatrix::zeros(n, 2);
    for (row, j) in (0..=m).rev().enumerate() {
        pts[(row, 0)] = psi[j];
        pts[(row, 1)] = params.upper_height(psi[j]);
    }
    for j in 1..=m {
        pts[(m + j, 0)] = psi[j];
        pts[(m + j, 1)] = params.lower_height(psi[j]);
    }
    LandmarkMatrix::new(pts)
}

/// Scales every coefficient by `1 + u·fraction`, `u ~ U[−1, 1]`, drawn from
/// a ChaCha8 stream seeded with `seed`. The trailing-edge thickness is kept.
pub fn perturb_cst(params: &CstParams, fraction: f64, seed: u64) -> Result<CstParams, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb_cst_with(params, fraction, &mut rng)
}

pub(crate) fn perturb_cst_with<R: Rng>(
    params: &CstParams,
    fraction: f64,
    rng: &mut R,
) -> Result<CstParams, GeometryError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(GeometryError::Parameter(format!(
            "perturbation fraction {fraction} outside [0, 1]"
        )));
    }
    params.check()?;
    let mut scale = |a: &f64| a * (1.0 + rng.random_range(-1.0..=1.0) * fraction);
    Ok(CstParams {
        upper: params.upper.iter().map(&mut scale).collect(),
        lower: params.lower.iter().map(&mut scale).collect(),
        te_thickness: params.te_thickness,
    })
}

/// Componentwise bounding box of the 18 coefficients over `params`.
pub fn cst_bounding_box(params: &[CstParams]) -> (Vec<f64>, Vec<f64>) {
    let mut lower = vec![f64::INFINITY; 2 * CST_COEFFS];
    let mut upper = vec![f64::NEG_INFINITY; 2 * CST_COEFFS];
    for p in params {
        for (k, c) in p.coefficients().into_iter().enumerate() {
            lower[k] = lower[k].min(c);
            upper[k] = upper[k].max(c);
        }
    }
    (lower, upper)
}

/// Airfoils at `steps` evenly spaced points of the coefficient segment
/// from `a` to `b` (ends included). Shapes are returned unvalidated.
pub fn cst_sweep(
    a: &[f64],
    b: &[f64],
    te_thickness: f64,
    steps: usize,
    n: usize,
) -> Result<Vec<LandmarkMatrix>, GeometryError> {
    (0..steps)
        .map(|k| {
            let s = if steps > 1 { k as f64 / (steps - 1) as f64 } else { 0.0 };
            let c: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect();
            cst_evaluate(&CstParams::from_coefficients(&c, te_thickness)?, n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_shape;

    fn flat(v: f64) -> Vec<f64> {
        vec![v; CST_COEFFS]
    }

    #[test]
    fn sweep_ends_are_box_corners() {
        let base = crate::geometry::synthetic_baselines();
        let (lo, hi) = cst_bounding_box(&base);
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
        let sw = cst_sweep(&lo, &hi, 0.0, 5, 31).unwrap();
        assert_eq!(sw.len(), 5);
        let first = cst_evaluate(&CstParams::from_coefficients(&lo, 0.0).unwrap(), 31).unwrap();
        assert_eq!(sw[0], first);
    }

    #[test]
    fn sampling_errors() {
        let p = CstParams::new(flat(0.2), flat(-0.2)).unwrap();
        assert_eq!(cst_evaluate(&p, 400), Err(GeometryError::InvalidSampling { n: 400 }));
        assert_eq!(cst_evaluate(&p, 5), Err(GeometryError::InvalidSampling { n: 5 }));
        assert!(CstParams::new(flat(0.2)[..8].to_vec(), flat(-0.2)).is_err());
        let bad = CstParams {
            upper: flat(0.1),
            lower: vec![0.0; 10],
            te_thickness: 0.0,
        };
        assert!(matches!(cst_evaluate(&bad, 11), Err(GeometryError::Parameter(_))));
    }

    #[test]
    fn zero_coefficients_collapse_to_chord_line() {
        let p = CstParams::new(flat(0.0), flat(0.0)).unwrap();
        let x = cst_evaluate(&p, 41).unwrap();
        assert!(x.points().column(1).iter().all(|y| *y == 0.0));
        assert!(!validate_shape(&x).full_rank);
    }

    #[test]
    fn mirrored_coefficients_give_symmetric_airfoil() {
        let up = vec![0.17, 0.15, 0.16, 0.12, 0.17, 0.12, 0.15, 0.13, 0.14];
        let lo: Vec<f64> = up.iter().map(|a| -a).collect();
        let p = CstParams::new(up, lo).unwrap();
        let n = 401;
        let x = cst_evaluate(&p, n).unwrap();
        let m = (n - 1) / 2;
        for j in 1..=m {
            let upper = x.row(m - j);
            let lower = x.row(m + j);
            assert_eq!(upper[0], lower[0]);
            assert!((upper[1] + lower[1]).abs() <= 1e-14);
        }
    }

    #[test]
    fn ordering_and_shared_leading_edge() {
        let p = CstParams::new(flat(0.2), flat(-0.2)).unwrap();
        let x = cst_evaluate(&p, 21).unwrap();
        assert_eq!(x.row(0), [1.0, 0.0]);
        assert_eq!(x.row(10), [0.0, 0.0]);
        assert_eq!(x.row(20)[0], 1.0);
        assert!(x.row(5)[1] > 0.0 && x.row(15)[1] < 0.0);
    }

    /// Independent dense sampling of the closed-form thickness curve.
    fn dense_max_thickness(up: f64, lo: f64, samples: usize) -> f64 {
        fn binom(n: u64, k: u64) -> f64 {
            let f = |m: u64| (1..=m).product::<u64>() as f64;
            f(n) / (f(k) * f(n - k))
        }
        (0..=samples)
            .map(|i| {
                let psi = i as f64 / samples as f64;
                let bern: f64 = (0..=8)
                    .map(|k| binom(8, k) * psi.powi(k as i32) * (1.0 - psi).powi(8 - k as i32))
                    .sum();
                let c = psi.sqrt() * (1.0 - psi);
                c * bern * up - c * bern * lo
            })
            .fold(f64::MIN, f64::max)
    }

    #[test]
    fn max_thickness_matches_dense_oracle() {
        let p = CstParams::new(flat(0.2), flat(-0.2)).unwrap();
        let n = 401;
        let x = cst_evaluate(&p, n).unwrap();
        let m = (n - 1) / 2;
        let sampled = (1..m)
            .map(|j| x.row(m - j)[1] - x.row(m + j)[1])
            .fold(f64::MIN, f64::max);
        let dense = dense_max_thickness(0.2, -0.2, 100_000);
        // closed form for constant coefficients: 0.4 · (1/√3) · (2/3)
        assert!((dense - 0.4 * (2.0 / 3.0) / 3f64.sqrt()).abs() < 1e-9);
        assert!(sampled <= dense + 1e-12);
        assert!(dense - sampled < 1e-4, "sampled {sampled} dense {dense}");
    }

    #[test]
    fn perturbation_bounds_and_determinism() {
        let p = CstParams::new(
            vec![0.17, 0.15, 0.16, 0.12, 0.17, 0.12, 0.15, 0.13, 0.14],
            vec![-0.15, -0.1, -0.12, -0.05, -0.09, -0.02, -0.03, 0.0, 0.01],
        )
        .unwrap();
        assert_eq!(perturb_cst(&p, 0.0, 3).unwrap(), p);
        for seed in 0..50 {
            let q = perturb_cst(&p, 0.2, seed).unwrap();
            for (a, b) in p.coefficients().iter().zip(q.coefficients()) {
                assert!((b - a).abs() <= 0.2 * a.abs() * (1.0 + 1e-12));
            }
            assert_eq!(q.te_thickness, p.te_thickness);
            assert_eq!(q, perturb_cst(&p, 0.2, seed).unwrap());
        }
        assert_ne!(perturb_cst(&p, 0.2, 1).unwrap(), perturb_cst(&p, 0.2, 2).unwrap());
        assert!(perturb_cst(&p, -0.1, 0).is_err());
    }
}
