//! Three-dimensional blades as ordered cross-sections over normalized span.
//!
//! Sections are LA-standardized, their representatives are rotated onto
//! each other from tip to hub (Procrustes clustering), and the affine parts
//! are interpolated over span with monotone cubics. A section at span `η`
//! is the geodesic blend of the neighbouring representatives rendered with
//! the interpolated affine map.

mod cluster;
mod interp;
mod perturb;
mod spline;

pub use cluster::procrustes_cluster;
pub use interp::{export_wireframe, interpolate_section, Wireframe};
pub use perturb::{perturb_blade, AffineKnob, BladeDesignSpace, PerturbationReport};
pub use spline::{MonotoneCubic, SplineError};

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::geometry::{affine_apply, cst_evaluate, synthetic_baselines, AffineMap, GeometryError, LandmarkMatrix};
use crate::grassmann::{la_standardize, GrassmannError, GrassmannPoint};
use crate::pga::PgaError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BladeError {
    #[error("a blade needs at least two stations (got {0})")]
    TooFewStations(usize),
    #[error("span positions must be finite and strictly increasing (violated at station {index})")]
    NonIncreasingSpan { index: usize },
    #[error("station {index} has {got} landmarks, expected {expected}")]
    LandmarkMismatch { index: usize, expected: usize, got: usize },
    #[error("span position {eta} outside [{lo}, {hi}]")]
    OutOfRange { eta: f64, lo: f64, hi: f64 },
    #[error("station {index}: {source}")]
    Station {
        index: usize,
        #[source]
        source: GrassmannError,
    },
    #[error("expected {expected} design parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("invalid affine design profile set: {0}")]
    Knobs(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pga(#[from] PgaError),
}

/// One cross-section as given.
#[derive(Debug, Clone)]
pub struct BladeStation {
    pub eta: f64,
    pub section: LandmarkMatrix,
    /// Affine part of the section's LA decomposition.
    pub affine: AffineMap,
}

/// Componentwise monotone cubic profiles of `M(η)` (four entries) and
/// `b(η)` (two entries), in [`AffineMap::components`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineProfiles {
    pub components: [MonotoneCubic; 6],
}

impl AffineProfiles {
    pub fn eval(&self, eta: f64) -> Result<AffineMap, GeometryError> {
        let c: [f64; 6] = std::array::from_fn(|i| self.components[i].eval(eta));
        AffineMap::from_components(c)
    }
}

/// Fits the six affine components over span.
pub fn fit_affine_splines(etas: &[f64], affines: &[AffineMap]) -> Result<AffineProfiles, BladeError> {
    if etas.len() < 2 {
        return Err(BladeError::TooFewStations(etas.len()));
    }
    check_span(etas)?;
    let comps: Vec<[f64; 6]> = affines.iter().map(AffineMap::components).collect();
    let mut fitted = Vec::with_capacity(6);
    for c in 0..6 {
        let y: Vec<f64> = comps.iter().map(|v| v[c]).collect();
        fitted.push(MonotoneCubic::new(etas, &y)?);
    }
    let components: [MonotoneCubic; 6] = fitted.try_into().expect("six components");
    Ok(AffineProfiles { components })
}

fn check_span(etas: &[f64]) -> Result<(), BladeError> {
    for (i, e) in etas.iter().enumerate() {
        if !e.is_finite() || (i > 0 && !(*e > etas[i - 1])) {
            return Err(BladeError::NonIncreasingSpan { index: i });
        }
    }
    Ok(())
}

/// Stations plus their clustered representatives and affine profiles.
///
/// `aligned[k]` spans the same subspace as station `k`'s LA representative
/// and `aligned[k]·aligned_affines[k]` reproduces its section. Immutable;
/// perturbation returns a new definition.
#[derive(Debug, Clone)]
pub struct BladeDefinition {
    pub stations: Vec<BladeStation>,
    pub aligned: Vec<GrassmannPoint>,
    pub aligned_affines: Vec<AffineMap>,
    pub profiles: AffineProfiles,
}

impl BladeDefinition {
    /// Builds a blade from `(η, section)` pairs ordered hub to tip.
    pub fn from_sections(sections: Vec<(f64, LandmarkMatrix)>) -> Result<Self, BladeError> {
        if sections.len() < 2 {
            return Err(BladeError::TooFewStations(sections.len()));
        }
        let etas: Vec<f64> = sections.iter().map(|s| s.0).collect();
        check_span(&etas)?;
        let n = sections[0].1.n();
        let mut stations = Vec::with_capacity(sections.len());
        let mut points = Vec::with_capacity(sections.len());
        for (index, (eta, section)) in sections.into_iter().enumerate() {
            if section.n() != n {
                return Err(BladeError::LandmarkMismatch {
                    index,
                    expected: n,
                    got: section.n(),
                });
            }
            let d = la_standardize(&section).map_err(|source| BladeError::Station { index, source })?;
            points.push(d.point);
            stations.push(BladeStation {
                eta,
                section,
                affine: d.affine,
            });
        }
        let (aligned, rotations) = procrustes_cluster(&points, true);
        let aligned_affines: Vec<AffineMap> = stations
            .iter()
            .zip(&rotations)
            .map(|(s, r)| {
                // X = U M + b = (U R)(Rᵀ M) + b
                AffineMap::new(r.transpose() * s.affine.linear(), *s.affine.translation())
            })
            .collect::<Result<_, _>>()?;
        let profiles = fit_affine_splines(&etas, &aligned_affines)?;
        Ok(Self {
            stations,
            aligned,
            aligned_affines,
            profiles,
        })
    }

    /// Assembles a definition from already clustered parts, refitting the
    /// profiles.
    pub(crate) fn from_aligned(
        stations: Vec<BladeStation>,
        aligned: Vec<GrassmannPoint>,
        aligned_affines: Vec<AffineMap>,
    ) -> Result<Self, BladeError> {
        let etas: Vec<f64> = stations.iter().map(|s| s.eta).collect();
        let profiles = fit_affine_splines(&etas, &aligned_affines)?;
        Ok(Self {
            stations,
            aligned,
            aligned_affines,
            profiles,
        })
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn n(&self) -> usize {
        self.stations[0].section.n()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.stations.iter().map(|s| s.eta).collect()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.stations[0].eta, self.stations[self.len() - 1].eta)
    }
}

/// Five-station synthetic blade: thick cambered sections at the hub thinning
/// toward the tip, with decreasing chord and twist about a pitch axis at
/// 30 % chord.
pub fn synthetic_blade(n: usize) -> Result<BladeDefinition, BladeError> {
    let base = synthetic_baselines();
    let picks = [15usize, 12, 8, 5, 1];
    let etas = [0.0f64, 0.25, 0.5, 0.75, 1.0];
    let mut sections = Vec::with_capacity(5);
    for (&b, &eta) in picks.iter().zip(&etas) {
        let airfoil = cst_evaluate(&base[b], n)?;
        let chord = 1.0 - 0.6 * eta;
        let twist = 0.25 * (1.0 - eta);
        let (s, c) = twist.sin_cos();
        let place = AffineMap::new(Matrix2::identity(), Vector2::new(-0.3, 0.0))?
            .then(&AffineMap::new(Matrix2::new(chord, 0.0, 0.0, chord), Vector2::zeros())?)
            .then(&AffineMap::new(
                Matrix2::new(c, -s, s, c),
                Vector2::new(0.0, 0.02 * eta),
            )?);
        sections.push((eta, affine_apply(&airfoil, &place)));
    }
    BladeDefinition::from_sections(sections)
}
