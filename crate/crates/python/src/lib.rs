//! Python bindings: bodies, equilibrium solves, potentials and the
//! verification harnesses. Compute-heavy calls release the GIL.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rieszcap::equilibrium::{self, SolverKind, SolverOptions};
use rieszcap::geometry::{self, ConvexBody, Direction};
use rieszcap::potential::{self, ExtensionField, PotentialField};
use rieszcap::verify::{self, Record, Relation, VerificationReport};
use rieszcap::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A convex body in R^N.
#[pyclass(name = "Body", frozen, from_py_object)]
#[derive(Clone)]
struct PyBody {
    inner: ConvexBody,
}

#[pymethods]
impl PyBody {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        ConvexBody::ball(center, radius).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn unit_ball(dim: usize) -> PyResult<Self> {
        if dim < 2 {
            return Err(PyValueError::new_err("dimension must be >= 2"));
        }
        Ok(Self { inner: ConvexBody::unit_ball(dim) })
    }

    #[staticmethod]
    fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> PyResult<Self> {
        ConvexBody::ellipsoid(center, semi_axes).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn polytope(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        ConvexBody::polytope(vertices).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn cuboid(center: Vec<f64>, half: Vec<f64>) -> PyResult<Self> {
        ConvexBody::cuboid(&center, &half).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (sides, circumradius=1.0, rotation=0.0))]
    fn regular_polygon(sides: usize, circumradius: f64, rotation: f64) -> PyResult<Self> {
        ConvexBody::regular_polygon(sides, circumradius, rotation).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Parse the JSON body format used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ConvexBody::from_json(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn support(&self, nu: Vec<f64>) -> PyResult<f64> {
        let dir = Direction::new(nu).map_err(to_py)?;
        geometry::support_function(&self.inner, &dir).map_err(to_py)
    }

    #[pyo3(signature = (quadrature_order=4096))]
    fn mean_width(&self, quadrature_order: usize) -> PyResult<f64> {
        geometry::mean_width(&self.inner, quadrature_order).map_err(to_py)
    }

    fn translated(&self, shift: Vec<f64>) -> PyResult<Self> {
        self.check_point(&shift)?;
        Ok(Self { inner: self.inner.translated(&shift) })
    }

    fn scaled(&self, r: f64) -> PyResult<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(PyValueError::new_err("scale factor must be positive"));
        }
        Ok(Self { inner: self.inner.scaled(r) })
    }

    fn dilated(&self, eps: f64) -> PyResult<Self> {
        self.inner.dilated(eps).map(|inner| Self { inner }).map_err(to_py)
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn __repr__(&self) -> String {
        format!("Body({})", self.inner.to_json().split_whitespace().collect::<Vec<_>>().join(" "))
    }
}

impl PyBody {
    fn check_point(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.inner.dim() {
            return Err(PyValueError::new_err(format!("expected {} coordinates, got {}", self.inner.dim(), x.len())));
        }
        Ok(())
    }
}

/// `(1-λ)K0 + λK1` as a body.
#[pyfunction]
fn minkowski_interpolate(k0: &PyBody, k1: &PyBody, lambda: f64) -> PyResult<PyBody> {
    geometry::minkowski_interpolate(&k0.inner, &k1.inner, lambda).map(|inner| PyBody { inner }).map_err(to_py)
}

#[pyclass(name = "CapacityResult", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyCapacityResult {
    energy: f64,
    capacity: f64,
    alpha: f64,
    resolution: usize,
    points: usize,
    kkt_residual: f64,
    iterations: usize,
    plateau_deviation: f64,
}

#[pymethods]
impl PyCapacityResult {
    fn __repr__(&self) -> String {
        format!(
            "CapacityResult(capacity={:.10}, energy={:.10}, alpha={}, points={}, kkt_residual={:.3e})",
            self.capacity, self.energy, self.alpha, self.points, self.kkt_residual
        )
    }
}

impl From<&equilibrium::CapacityResult> for PyCapacityResult {
    fn from(r: &equilibrium::CapacityResult) -> Self {
        Self {
            energy: r.energy,
            capacity: r.capacity,
            alpha: r.alpha,
            resolution: r.resolution,
            points: r.points,
            kkt_residual: r.kkt_residual,
            iterations: r.iterations,
            plateau_deviation: r.plateau_deviation,
        }
    }
}

fn solver_options(solver: &str, tolerance: f64, max_iterations: usize) -> PyResult<SolverOptions> {
    let kind = match solver {
        "active-set" => SolverKind::ActiveSet,
        "frank-wolfe" => SolverKind::FrankWolfe,
        other => return Err(PyValueError::new_err(format!("unknown solver {other:?}"))),
    };
    Ok(SolverOptions { kind, tolerance, max_iterations })
}

/// Discrete α-capacity of a body.
#[pyfunction]
#[pyo3(signature = (body, alpha, resolution=500))]
fn capacity(py: Python<'_>, body: &PyBody, alpha: f64, resolution: usize) -> PyResult<PyCapacityResult> {
    let inner = body.inner.clone();
    let r = py.detach(move || equilibrium::capacity(&inner, alpha, resolution)).map_err(to_py)?;
    Ok((&r).into())
}

/// Equilibrium measure as `(result, points, masses)`.
#[pyfunction]
#[pyo3(signature = (body, alpha, resolution=500, solver="active-set", tolerance=1e-7, max_iterations=100_000))]
fn equilibrium_measure(
    py: Python<'_>,
    body: &PyBody,
    alpha: f64,
    resolution: usize,
    solver: &str,
    tolerance: f64,
    max_iterations: usize,
) -> PyResult<(PyCapacityResult, Vec<Vec<f64>>, Vec<f64>)> {
    let options = solver_options(solver, tolerance, max_iterations)?;
    let inner = body.inner.clone();
    let eq = py.detach(move || equilibrium::equilibrium(&inner, alpha, resolution, &options)).map_err(to_py)?;
    let points = eq.measure.cloud().points().to_vec();
    Ok(((&eq.result).into(), points, eq.measure.masses().to_vec()))
}

/// Riesz potential of an equilibrium measure, normalized to 1 on the body.
#[pyclass(name = "Potential", frozen)]
struct PyPotential {
    field: Arc<PotentialField>,
}

#[pymethods]
impl PyPotential {
    /// Normalized potential, clamped into (0, 1].
    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check(&x)?;
        Ok(self.field.value(&x))
    }

    /// Unnormalized `∫|x-y|^{α-N} dμ(y)`.
    fn potential(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check(&x)?;
        Ok(self.field.potential(&x))
    }

    /// Harmonic extension into the upper half-space at height `t >= 0`.
    fn extension(&self, x: Vec<f64>, t: f64) -> PyResult<f64> {
        self.check(&x)?;
        if !(t >= 0.0) {
            return Err(PyValueError::new_err("height must be nonnegative"));
        }
        let ext = ExtensionField::new(&self.field).map_err(to_py)?;
        Ok(potential::harmonic_extension(&ext, &x, t))
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.field.alpha()
    }

    #[getter]
    fn capacity_result(&self) -> Option<PyCapacityResult> {
        self.field.capacity_result().map(Into::into)
    }
}

impl PyPotential {
    fn check(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.field.dim() || x.iter().any(|v| !v.is_finite()) {
            return Err(PyValueError::new_err(format!("expected {} finite coordinates", self.field.dim())));
        }
        Ok(())
    }
}

/// Capacitary function of a body (α = 1).
#[pyfunction]
#[pyo3(signature = (body, resolution=500))]
fn capacitary_function(py: Python<'_>, body: &PyBody, resolution: usize) -> PyResult<PyPotential> {
    let inner = body.inner.clone();
    let field = py.detach(move || potential::capacitary_function(&inner, resolution)).map_err(to_py)?;
    Ok(PyPotential { field: Arc::new(field) })
}

fn record_dict<'py>(py: Python<'py>, r: &Record) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("case", &r.case)?;
    d.set_item("measured", r.measured)?;
    d.set_item("threshold", r.threshold)?;
    d.set_item(
        "relation",
        match r.relation {
            Relation::AtLeast => "at_least",
            Relation::AtMost => "at_most",
        },
    )?;
    d.set_item("pass", r.pass)?;
    d.set_item("values", r.values.clone())?;
    d.set_item("error", r.error.clone())?;
    Ok(d)
}

fn report_dict<'py>(py: Python<'py>, report: &VerificationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("harness", &report.harness)?;
    d.set_item("exploratory", report.exploratory)?;
    d.set_item("pass", report.pass)?;
    let records = report.records.iter().map(|r| record_dict(py, r)).collect::<PyResult<Vec<_>>>()?;
    d.set_item("records", records)?;
    Ok(d)
}

/// Brunn–Minkowski deficits along the Minkowski interpolation of two bodies.
#[pyfunction]
#[pyo3(signature = (k0, k1, alpha=1.0, lambdas=vec![0.25, 0.5, 0.75], resolution=500, tol=1e-2))]
fn brunn_minkowski<'py>(
    py: Python<'py>,
    k0: &PyBody,
    k1: &PyBody,
    alpha: f64,
    lambdas: Vec<f64>,
    resolution: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let (a, b) = (k0.inner.clone(), k1.inner.clone());
    let report = py
        .detach(move || verify::check_brunn_minkowski(&a, &b, alpha, &lambdas, resolution, tol))
        .map_err(to_py)?;
    report_dict(py, &report)
}

/// Capacities of `K + εB` for decreasing ε and their limit.
#[pyfunction]
#[pyo3(signature = (body, epsilons, alpha=1.0, resolution=500, tol=1e-2))]
fn continuity<'py>(
    py: Python<'py>,
    body: &PyBody,
    epsilons: Vec<f64>,
    alpha: f64,
    resolution: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let inner = body.inner.clone();
    let report = py
        .detach(move || verify::capacity_continuity_check(&inner, &epsilons, alpha, resolution, tol))
        .map_err(to_py)?;
    report_dict(py, &report)
}

#[pymodule]
fn rieszcap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyBody>()?;
    m.add_class::<PyCapacityResult>()?;
    m.add_class::<PyPotential>()?;
    m.add_function(wrap_pyfunction!(minkowski_interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium_measure, m)?)?;
    m.add_function(wrap_pyfunction!(capacitary_function, m)?)?;
    m.add_function(wrap_pyfunction!(brunn_minkowski, m)?)?;
    m.add_function(wrap_pyfunction!(continuity, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::ffi::c_str;

    #[test]
    fn module_exposes_capacity_and_maps_errors() {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "rieszcap_py").unwrap();
            rieszcap_py(&m).unwrap();
            let locals = PyDict::new(py);
            locals.set_item("rc", &m).unwrap();
            py.run(
                c_str!(
                    "r = rc.capacity(rc.Body.unit_ball(2), 1.0, 300)\n\
                     assert abs(r.capacity - 0.6366) < 0.01, r\n\
                     try:\n    rc.Body.ball([0.0, 0.0], -1.0)\n    raise AssertionError\n\
                     except ValueError:\n    pass\n"
                ),
                None,
                Some(&locals),
            )
            .unwrap();
        });
    }
}
