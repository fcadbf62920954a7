//! Python bindings. Point sets cross the boundary as lists of `[x, y]`
//! pairs (any sequence of pairs, including a NumPy `(n, 2)` array, is
//! accepted); errors surface as `ValueError`.

use std::path::PathBuf;

use nalgebra::{DMatrix, Matrix2, Vector2};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use grassfoil::blade::{self, AffineKnob, BladeDesignSpace};
use grassfoil::geometry::{self, AffineMap, CstParams, LandmarkMatrix, PerturbationPlan};
use grassfoil::grassmann::{self, GrassmannPoint, TangentVector};
use grassfoil::io;
use grassfoil::pga::{self, PgaModel};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: &[Vec<f64>], cols: usize) -> PyResult<DMatrix<f64>> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(PyValueError::new_err(format!(
            "row {i} has {} entries, expected {cols}",
            r.len()
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

fn landmarks(points: Vec<Vec<f64>>) -> PyResult<LandmarkMatrix> {
    LandmarkMatrix::new(matrix(&points, 2)?).map_err(err)
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix2(m: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Invertible 2×2 linear part `M` and translation `b`, acting on the right:
/// `X ↦ X·M + 1bᵀ`.
#[pyclass(name = "AffineMap", module = "grassfoil", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAffineMap {
    inner: AffineMap,
}

#[pymethods]
impl PyAffineMap {
    #[new]
    #[pyo3(signature = (linear, translation = [0.0, 0.0]))]
    fn new(linear: [[f64; 2]; 2], translation: [f64; 2]) -> PyResult<Self> {
        let inner = AffineMap::new(matrix2(linear), Vector2::new(translation[0], translation[1])).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn identity() -> Self {
        Self {
            inner: AffineMap::identity(),
        }
    }

    #[getter]
    fn linear(&self) -> [[f64; 2]; 2] {
        let m = self.inner.linear();
        [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
    }

    #[getter]
    fn translation(&self) -> [f64; 2] {
        let b = self.inner.translation();
        [b[0], b[1]]
    }

    /// `[M11, M12, M21, M22, b1, b2]`.
    fn components(&self) -> [f64; 6] {
        self.inner.components()
    }

    fn apply(&self, points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let x = landmarks(points)?;
        Ok(to_rows(geometry::affine_apply(&x, &self.inner).points()))
    }

    /// This map followed by `other`.
    fn then(&self, other: &PyAffineMap) -> Self {
        Self {
            inner: self.inner.then(&other.inner),
        }
    }

    fn inverse(&self) -> Self {
        Self {
            inner: self.inner.inverse(),
        }
    }

    fn __repr__(&self) -> String {
        format!("AffineMap(components={:?})", self.inner.components())
    }
}

/// Point of G(n, 2) held by an orthonormal `n × 2` representative.
#[pyclass(name = "GrassmannPoint", module = "grassfoil", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrassmannPoint {
    inner: GrassmannPoint,
}

#[pymethods]
impl PyGrassmannPoint {
    /// Orthonormalizes the columns of `rep` (an `n × 2` full-rank array).
    #[new]
    fn new(rep: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = GrassmannPoint::new(matrix(&rep, 2)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn rep(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.rep())
    }

    fn distance(&self, other: &PyGrassmannPoint) -> PyResult<f64> {
        grassmann::distance(&self.inner, &other.inner).map_err(err)
    }

    fn principal_angles(&self, other: &PyGrassmannPoint) -> PyResult<Vec<f64>> {
        grassmann::principal_angles(&self.inner, &other.inner).map_err(err)
    }

    fn log(&self, other: &PyGrassmannPoint) -> PyResult<PyTangentVector> {
        let inner = grassmann::log_map(&self.inner, &other.inner).map_err(err)?;
        Ok(PyTangentVector { inner })
    }

    fn exp(&self, v: &PyTangentVector) -> PyResult<PyGrassmannPoint> {
        let inner = grassmann::exp_map(&self.inner, &v.inner).map_err(err)?;
        Ok(Self { inner })
    }

    fn geodesic(&self, other: &PyGrassmannPoint, t: f64) -> PyResult<PyGrassmannPoint> {
        let inner = grassmann::geodesic_point(&self.inner, &other.inner, t).map_err(err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("GrassmannPoint(n={})", self.inner.n())
    }
}

/// Horizontal tangent matrix at a Grassmann point.
#[pyclass(name = "TangentVector", module = "grassfoil", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTangentVector {
    inner: TangentVector,
}

#[pymethods]
impl PyTangentVector {
    /// Projects `mat` onto the horizontal space at `base`.
    #[new]
    fn new(base: &PyGrassmannPoint, mat: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = TangentVector::project(&base.inner, &matrix(&mat, 2)?).map_err(err)?;
        Ok(Self { inner })
    }

    fn mat(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.mat())
    }

    #[getter]
    fn base(&self) -> PyGrassmannPoint {
        PyGrassmannPoint {
            inner: self.inner.base().clone(),
        }
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn inner(&self, other: &PyTangentVector) -> f64 {
        self.inner.inner(&other.inner)
    }

    fn scaled(&self, t: f64) -> Self {
        Self {
            inner: self.inner.scaled(t),
        }
    }

    /// Parallel transport along `t ↦ Exp(t·direction)` from this vector's
    /// base to parameter `t`.
    #[pyo3(signature = (direction, t = 1.0))]
    fn transport(&self, direction: &PyTangentVector, t: f64) -> PyResult<Self> {
        let inner = grassmann::parallel_transport(self.inner.base(), &direction.inner, &self.inner, t).map_err(err)?;
        Ok(Self { inner })
    }
}

/// LA standardization `X = X̃M + 1bᵀ`; returns `(point, affine)`.
#[pyfunction]
fn la_standardize(points: Vec<Vec<f64>>) -> PyResult<(PyGrassmannPoint, PyAffineMap)> {
    let d = grassmann::la_standardize(&landmarks(points)?).map_err(err)?;
    Ok((PyGrassmannPoint { inner: d.point }, PyAffineMap { inner: d.affine }))
}

/// Closest rotation `R` (as a 2×2 nested list) with `q·R` aligned to `p`.
#[pyfunction]
fn procrustes_rotation(p: &PyGrassmannPoint, q: &PyGrassmannPoint) -> [[f64; 2]; 2] {
    let r = grassmann::procrustes_rotation(&p.inner, &q.inner);
    [[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]]
}

/// Samples a CST airfoil at `n` landmarks.
#[pyfunction]
#[pyo3(signature = (upper, lower, n = geometry::DEFAULT_LANDMARKS, te_thickness = 0.0))]
fn cst_evaluate(upper: Vec<f64>, lower: Vec<f64>, n: usize, te_thickness: f64) -> PyResult<Vec<Vec<f64>>> {
    let mut p = CstParams::new(upper, lower).map_err(err)?;
    p.te_thickness = te_thickness;
    Ok(to_rows(geometry::cst_evaluate(&p, n).map_err(err)?.points()))
}

/// The sixteen synthetic baselines as `(upper, lower)` coefficient pairs.
#[pyfunction]
fn synthetic_baselines() -> Vec<(Vec<f64>, Vec<f64>)> {
    geometry::synthetic_baselines()
        .into_iter()
        .map(|p| (p.upper, p.lower))
        .collect()
}

/// Validity diagnostics of a landmark listing.
#[pyfunction]
fn validate_shape<'py>(py: Python<'py>, points: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let d = geometry::validate_shape(&landmarks(points)?);
    let out = PyDict::new(py);
    out.set_item("valid", d.is_valid())?;
    out.set_item("rank_ratio", d.rank_ratio)?;
    out.set_item("full_rank", d.full_rank)?;
    out.set_item("simple", d.simple)?;
    out.set_item("crossing", d.crossing)?;
    out.set_item("leading_edge_extrema", d.leading_edge_extrema)?;
    out.set_item("signed_area", d.signed_area)?;
    out.set_item("ordering_ok", d.ordering_ok)?;
    Ok(out)
}

/// Baselines plus perturbations; returns the landmark listings in order.
#[pyfunction]
#[pyo3(signature = (total = 1000, fraction = 0.2, seed = 7, n = geometry::DEFAULT_LANDMARKS, per_baseline = false))]
fn gen_dataset(total: usize, fraction: f64, seed: u64, n: usize, per_baseline: bool) -> PyResult<Vec<Vec<Vec<f64>>>> {
    let plan = if per_baseline {
        PerturbationPlan::PerBaseline(total)
    } else {
        PerturbationPlan::Total(total)
    };
    let data = geometry::gen_dataset(&geometry::synthetic_baselines(), plan, fraction, seed, n).map_err(err)?;
    Ok(data.shapes().map(|x| to_rows(x.points())).collect())
}

/// Karcher mean; returns `(point, iterations, residual)`.
#[pyfunction]
#[pyo3(signature = (points, tol = pga::DEFAULT_KARCHER_TOL, max_iter = pga::DEFAULT_MAX_ITER))]
fn karcher_mean(
    points: Vec<PyRef<'_, PyGrassmannPoint>>,
    tol: f64,
    max_iter: usize,
) -> PyResult<(PyGrassmannPoint, usize, f64)> {
    let pts: Vec<GrassmannPoint> = points.iter().map(|p| p.inner.clone()).collect();
    let km = pga::karcher_mean(&pts, tol, max_iter).map_err(err)?;
    Ok((PyGrassmannPoint { inner: km.point }, km.iterations, km.residual))
}

/// Principal geodesic model: mean, basis, eigenvalues and coordinate domain.
#[pyclass(name = "PgaModel", module = "grassfoil", frozen, skip_from_py_object)]
struct PyPgaModel {
    inner: PgaModel,
}

#[pymethods]
impl PyPgaModel {
    /// Fits `r` principal directions at `mean` (the Karcher mean of
    /// `points` when omitted).
    #[staticmethod]
    #[pyo3(signature = (points, r = 4, mean = None))]
    fn fit(
        points: Vec<PyRef<'_, PyGrassmannPoint>>,
        r: usize,
        mean: Option<PyRef<'_, PyGrassmannPoint>>,
    ) -> PyResult<Self> {
        let pts: Vec<GrassmannPoint> = points.iter().map(|p| p.inner.clone()).collect();
        let mean = match mean {
            Some(m) => m.inner.clone(),
            None => {
                pga::karcher_mean(&pts, pga::DEFAULT_KARCHER_TOL, pga::DEFAULT_MAX_ITER)
                    .map_err(err)?
                    .point
            }
        };
        Ok(Self {
            inner: pga::pga_fit(&pts, &mean, r).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: io::read_model(&path).map_err(err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::write_model(&path, &self.inner).map_err(err)
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn mean(&self) -> PyGrassmannPoint {
        PyGrassmannPoint {
            inner: self.inner.mean.clone(),
        }
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn spectrum(&self) -> Vec<f64> {
        self.inner.spectrum.clone()
    }

    /// `(lower, upper, radii)` of the normal-coordinate domain.
    #[getter]
    fn domain(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = &self.inner.domain;
        (d.lower.clone(), d.upper.clone(), d.radii.clone())
    }

    fn basis(&self) -> Vec<PyTangentVector> {
        self.inner
            .basis
            .iter()
            .map(|u| PyTangentVector { inner: u.clone() })
            .collect()
    }

    fn synthesize(&self, t: Vec<f64>) -> PyResult<PyGrassmannPoint> {
        Ok(PyGrassmannPoint {
            inner: pga::synthesize(&self.inner, &t).map_err(err)?,
        })
    }

    fn coords_of(&self, point: &PyGrassmannPoint) -> PyResult<Vec<f64>> {
        pga::coords_of(&self.inner, &point.inner).map_err(err)
    }

    fn contains(&self, t: Vec<f64>) -> bool {
        pga::domain_contains(&self.inner, &t)
    }
}

/// Blade built from `(eta, section)` pairs ordered hub to tip.
#[pyclass(name = "Blade", module = "grassfoil", frozen, skip_from_py_object)]
struct PyBlade {
    inner: blade::BladeDefinition,
}

#[pymethods]
impl PyBlade {
    #[new]
    fn new(sections: Vec<(f64, Vec<Vec<f64>>)>) -> PyResult<Self> {
        let sections = sections
            .into_iter()
            .map(|(eta, pts)| Ok((eta, landmarks(pts)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: blade::BladeDefinition::from_sections(sections).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n = geometry::DEFAULT_LANDMARKS))]
    fn synthetic(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: blade::synthetic_blade(n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: io::read_blade(&path).map_err(err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::write_blade(&path, &self.inner).map_err(err)
    }

    #[getter]
    fn etas(&self) -> Vec<f64> {
        self.inner.etas()
    }

    fn section(&self, k: usize) -> PyResult<Vec<Vec<f64>>> {
        let s = self
            .inner
            .stations
            .get(k)
            .ok_or_else(|| PyValueError::new_err(format!("no station {k}")))?;
        Ok(to_rows(s.section.points()))
    }

    fn interpolate(&self, eta: f64) -> PyResult<Vec<Vec<f64>>> {
        Ok(to_rows(
            blade::interpolate_section(&self.inner, eta).map_err(err)?.points(),
        ))
    }

    /// `(spans·n) × 3` rows of `(x, y, eta)`.
    fn wireframe(&self, spans: usize) -> PyResult<Vec<Vec<f64>>> {
        Ok(to_rows(
            &blade::export_wireframe(&self.inner, spans).map_err(err)?.points,
        ))
    }

    /// Consistent perturbation by normal coordinates `t` and optional affine
    /// knobs; returns `(blade, per-station transported norms)`.
    #[pyo3(signature = (model, t, knobs = Vec::new(), knob_values = Vec::new()))]
    fn perturb(
        &self,
        model: &PyPgaModel,
        t: Vec<f64>,
        knobs: Vec<String>,
        knob_values: Vec<f64>,
    ) -> PyResult<(PyBlade, Vec<f64>)> {
        let (inner, report) = if knobs.is_empty() {
            blade::perturb_blade(&self.inner, &model.inner, &t).map_err(err)?
        } else {
            let knobs: Vec<AffineKnob> = knobs.iter().map(|k| k.parse()).collect::<Result<_, _>>().map_err(err)?;
            let space = BladeDesignSpace::new(model.inner.r(), knobs).map_err(err)?;
            let params: Vec<f64> = t.iter().chain(&knob_values).copied().collect();
            space.apply(&self.inner, &model.inner, &params).map_err(err)?
        };
        Ok((PyBlade { inner }, report.norms))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pymodule]
#[pyo3(name = "grassfoil")]
fn grassfoil_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAffineMap>()?;
    m.add_class::<PyGrassmannPoint>()?;
    m.add_class::<PyTangentVector>()?;
    m.add_class::<PyPgaModel>()?;
    m.add_class::<PyBlade>()?;
    m.add_function(wrap_pyfunction!(la_standardize, m)?)?;
    m.add_function(wrap_pyfunction!(procrustes_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(cst_evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_baselines, m)?)?;
    m.add_function(wrap_pyfunction!(validate_shape, m)?)?;
    m.add_function(wrap_pyfunction!(gen_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(karcher_mean, m)?)?;
    Ok(())
}
