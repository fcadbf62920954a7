use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::{BladeDefinition, BladeError, BladeStation};
use crate::geometry::{affine_apply, AffineMap, LandmarkMatrix};
use crate::grassmann::{exp_map, log_map, parallel_transport, GrassmannError, TangentVector};
use crate::pga::PgaModel;

/// Per-station diagnostics of a consistent perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    /// `‖τv‖` at each station.
    pub norms: Vec<f64>,
    /// `⟨τuⱼ, τv⟩` at each station; equal to `t` up to roundoff.
    pub coords: Vec<Vec<f64>>,
}

impl PerturbationReport {
    /// Largest deviation of the per-station norms from the norm at the mean.
    pub fn norm_spread(&self, reference: f64) -> f64 {
        self.norms.iter().map(|n| (n - reference).abs()).fold(0.0, f64::max)
    }

    pub fn coord_error(&self, t: &[f64]) -> f64 {
        self.coords
            .iter()
            .flat_map(|c| c.iter().zip(t).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// Applies the PGA perturbation `v = Σ tⱼuⱼ` (defined at the Karcher mean)
/// to every station: `v` is parallel-transported along the geodesic from
/// the mean to the station and the station is moved by `Exp`. Affine
/// profiles are kept.
pub fn perturb_blade(
    blade: &BladeDefinition,
    model: &PgaModel,
    t: &[f64],
) -> Result<(BladeDefinition, PerturbationReport), BladeError> {
    if t.len() != model.r() {
        return Err(BladeError::ParameterCount {
            expected: model.r(),
            got: t.len(),
        });
    }
    let v = model.tangent(t)?;
    if t.iter().all(|x| *x == 0.0) {
        let report = PerturbationReport {
            norms: vec![0.0; blade.len()],
            coords: vec![vec![0.0; t.len()]; blade.len()],
        };
        return Ok((blade.clone(), report));
    }
    let mut aligned = Vec::with_capacity(blade.len());
    let mut stations = Vec::with_capacity(blade.len());
    let mut norms = Vec::with_capacity(blade.len());
    let mut coords = Vec::with_capacity(blade.len());
    for (index, (point, affine)) in blade.aligned.iter().zip(&blade.aligned_affines).enumerate() {
        let at_station = |e: GrassmannError| BladeError::Station { index, source: e };
        let direction = log_map(&model.mean, point).map_err(at_station)?;
        let transport = |w: &TangentVector| -> Result<TangentVector, BladeError> {
            Ok(parallel_transport(&model.mean, &direction, w, 1.0)
                .map_err(at_station)?
                .rebased(point))
        };
        let moved = transport(&v)?;
        let basis_coords = model
            .basis
            .iter()
            .map(|u| Ok(transport(u)?.inner(&moved)))
            .collect::<Result<Vec<f64>, BladeError>>()?;
        norms.push(moved.norm());
        coords.push(basis_coords);

        let new_point = exp_map(point, &moved).map_err(at_station)?;
        let rep = LandmarkMatrix::new(new_point.rep().clone())?;
        stations.push(BladeStation {
            eta: blade.stations[index].eta,
            section: affine_apply(&rep, affine),
            affine: *affine,
        });
        aligned.push(new_point);
    }
    let def = BladeDefinition::from_aligned(stations, aligned, blade.aligned_affines.clone())?;
    Ok((def, PerturbationReport { norms, coords }))
}

/// A scalar design knob acting on the affine profiles of every station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AffineKnob {
    /// Added twist in radians about the blade-frame origin.
    Twist,
    /// Relative change of chord (first coordinate).
    Chord,
    /// Relative change of thickness (second coordinate).
    Thickness,
    /// Shear of the first coordinate along the second.
    Shear,
    ShiftX,
    ShiftY,
}

impl AffineKnob {
    pub const ALL: [AffineKnob; 6] = [
        Self::Twist,
        Self::Chord,
        Self::Thickness,
        Self::Shear,
        Self::ShiftX,
        Self::ShiftY,
    ];

    fn affine(&self, value: f64) -> Result<AffineMap, BladeError> {
        let (m, b) = match self {
            Self::Twist => {
                let (s, c) = value.sin_cos();
                (Matrix2::new(c, -s, s, c), Vector2::zeros())
            }
            Self::Chord => (Matrix2::new(1.0 + value, 0.0, 0.0, 1.0), Vector2::zeros()),
            Self::Thickness => (Matrix2::new(1.0, 0.0, 0.0, 1.0 + value), Vector2::zeros()),
            Self::Shear => (Matrix2::new(1.0, 0.0, value, 1.0), Vector2::zeros()),
            Self::ShiftX => (Matrix2::identity(), Vector2::new(value, 0.0)),
            Self::ShiftY => (Matrix2::identity(), Vector2::new(0.0, value)),
        };
        Ok(AffineMap::new(m, b)?)
    }
}

impl std::str::FromStr for AffineKnob {
    type Err = BladeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "twist" => Ok(Self::Twist),
            "chord" => Ok(Self::Chord),
            "thickness" => Ok(Self::Thickness),
            "shear" => Ok(Self::Shear),
            "shift-x" => Ok(Self::ShiftX),
            "shift-y" => Ok(Self::ShiftY),
            other => Err(BladeError::Knobs(format!("unknown knob `{other}`"))),
        }
    }
}

/// Blade perturbation space: `r` submanifold coordinates followed by one
/// value per selected affine knob (three to six of them).
#[derive(Debug, Clone, PartialEq)]
pub struct BladeDesignSpace {
    r: usize,
    knobs: Vec<AffineKnob>,
}

impl BladeDesignSpace {
    pub fn new(r: usize, knobs: Vec<AffineKnob>) -> Result<Self, BladeError> {
        if !(3..=6).contains(&knobs.len()) {
            return Err(BladeError::Knobs(format!(
                "between 3 and 6 affine knobs required, got {}",
                knobs.len()
            )));
        }
        for (i, k) in knobs.iter().enumerate() {
            if knobs[..i].contains(k) {
                return Err(BladeError::Knobs(format!("duplicate knob {k:?}")));
            }
        }
        Ok(Self { r, knobs })
    }

    pub fn submanifold_dim(&self) -> usize {
        self.r
    }

    pub fn knobs(&self) -> &[AffineKnob] {
        &self.knobs
    }

    pub fn parameter_count(&self) -> usize {
        self.r + self.knobs.len()
    }

    /// Applies `params` (submanifold coordinates first) to `blade`.
    pub fn apply(
        &self,
        blade: &BladeDefinition,
        model: &PgaModel,
        params: &[f64],
    ) -> Result<(BladeDefinition, PerturbationReport), BladeError> {
        if params.len() != self.parameter_count() {
            return Err(BladeError::ParameterCount {
                expected: self.parameter_count(),
                got: params.len(),
            });
        }
        if model.r() != self.r {
            return Err(BladeError::ParameterCount {
                expected: self.r,
                got: model.r(),
            });
        }
        let (t, knob_values) = params.split_at(self.r);
        let (perturbed, report) = perturb_blade(blade, model, t)?;
        if knob_values.iter().all(|x| *x == 0.0) {
            return Ok((perturbed, report));
        }
        let mut global = AffineMap::identity();
        for (knob, value) in self.knobs.iter().zip(knob_values) {
            global = global.then(&knob.affine(*value)?);
        }
        let affines: Vec<AffineMap> = perturbed.aligned_affines.iter().map(|a| a.then(&global)).collect();
        let stations = perturbed
            .stations
            .iter()
            .zip(&affines)
            .map(|(s, a)| BladeStation {
                eta: s.eta,
                section: affine_apply(&s.section, &global),
                affine: *a,
            })
            .collect();
        let def = BladeDefinition::from_aligned(stations, perturbed.aligned, affines)?;
        Ok((def, report))
    }
}
