use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cst::perturb_cst_with;
use super::{cst_evaluate, validate_shape, CstParams, GeometryError, LandmarkMatrix};

/// 201 stations per surface with a shared leading-edge point.
pub const DEFAULT_LANDMARKS: usize = 401;

const MAX_ATTEMPTS: u64 = 64;

/// How many perturbed shapes to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationPlan {
    /// Spread a total count over the baselines; the first `total % B`
    /// baselines get one extra shape.
    Total(usize),
    PerBaseline(usize),
}

impl PerturbationPlan {
    fn counts(&self, baselines: usize) -> Vec<usize> {
        match *self {
            Self::PerBaseline(k) => vec![k; baselines],
            Self::Total(total) if baselines > 0 => (0..baselines)
                .map(|b| total / baselines + usize::from(b < total % baselines))
                .collect(),
            Self::Total(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub baseline: usize,
    /// `None` for the baseline itself, otherwise the running perturbation
    /// index used to derive its random stream.
    pub perturbation: Option<usize>,
    pub params: CstParams,
    pub shape: LandmarkMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
    pub rejections: usize,
}

impl Dataset {
    pub fn shapes(&self) -> impl Iterator<Item = &LandmarkMatrix> {
        self.entries.iter().map(|e| &e.shape)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-shape generator: stream `(index, attempt)` of the base seed, so a
/// shape's coefficients do not depend on generation order.
fn shape_rng(seed: u64, index: usize, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((index as u64) << 16) | attempt);
    rng
}

/// Baselines followed by their perturbations (grouped by baseline), all
/// sampled at the same cosine stations so landmark `i` corresponds across
/// the whole set. Perturbations failing [`validate_shape`] are redrawn.
pub fn gen_dataset(
    baselines: &[CstParams],
    plan: PerturbationPlan,
    fraction: f64,
    seed: u64,
    n: usize,
) -> Result<Dataset, GeometryError> {
    let mut entries = Vec::new();
    for (b, params) in baselines.iter().enumerate() {
        let shape = cst_evaluate(params, n)?;
        let diag = validate_shape(&shape);
        if !diag.is_valid() {
            return Err(GeometryError::Parameter(format!(
                "baseline {b} is not a valid airfoil: {diag:?}"
            )));
        }
        entries.push(DatasetEntry {
            baseline: b,
            perturbation: None,
            params: params.clone(),
            shape,
        });
    }

    let mut rejections = 0;
    let mut index = 0;
    for (b, count) in plan.counts(baselines.len()).into_iter().enumerate() {
        for _ in 0..count {
            let mut accepted = None;
            for attempt in 0..MAX_ATTEMPTS {
                let mut rng = shape_rng(seed, index, attempt);
                let params = perturb_cst_with(&baselines[b], fraction, &mut rng)?;
                let shape = cst_evaluate(&params, n)?;
                if validate_shape(&shape).is_valid() {
                    accepted = Some((params, shape));
                    break;
                }
                log::warn!("perturbation {index} of baseline {b} rejected (attempt {attempt})");
                rejections += 1;
            }
            let (params, shape) = accepted.ok_or(GeometryError::Rejected {
                index,
                attempts: MAX_ATTEMPTS as usize,
            })?;
            entries.push(DatasetEntry {
                baseline: b,
                perturbation: Some(index),
                params,
                shape,
            });
            index += 1;
        }
    }
    Ok(Dataset { entries, rejections })
}

/// Sixteen synthetic baseline airfoils spanning thin to very thick and
/// symmetric to strongly cambered sections.
///
/// Each is built from a thickness distribution `T` (front- or aft-loaded),
/// a thickness scale `s` and a camber scale `c`:
/// `upper = s·T + c·K`, `lower = −s·T + c·K`, with `K` a mid-chord camber
/// shape. The scales run from roughly 12 % to 40 % thickness.
pub fn synthetic_baselines() -> Vec<CstParams> {
    const FRONT: [f64; 9] = [0.20, 0.17, 0.16, 0.15, 0.14, 0.13, 0.12, 0.11, 0.10];
    const AFT: [f64; 9] = [0.14, 0.14, 0.15, 0.16, 0.17, 0.17, 0.16, 0.14, 0.12];
    const CAMBER: [f64; 9] = [0.02, 0.04, 0.06, 0.07, 0.07, 0.06, 0.05, 0.04, 0.03];
    const DESIGNS: [(f64, f64); 16] = [
        (0.9, 0.0),
        (0.9, 1.0),
        (1.1, 0.5),
        (1.1, 1.5),
        (1.3, 0.0),
        (1.3, 1.0),
        (1.5, 0.5),
        (1.5, 2.0),
        (1.8, 1.0),
        (1.8, 2.0),
        (2.1, 0.5),
        (2.1, 1.5),
        (2.5, 1.0),
        (2.5, 2.0),
        (3.0, 0.0),
        (3.0, 1.5),
    ];
    DESIGNS
        .iter()
        .enumerate()
        .map(|(i, &(s, c))| {
            let t = if i % 2 == 0 { &FRONT } else { &AFT };
            let upper = (0..9).map(|k| s * t[k] + c * CAMBER[k]).collect();
            let lower = (0..9).map(|k| -s * t[k] + c * CAMBER[k]).collect();
            CstParams::new(upper, lower).expect("nine coefficients per surface")
        })
        .collect()
}
