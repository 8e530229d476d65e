//! Python bindings: grids, bodies, extremal functions, geodesics and
//! rooftop envelopes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pshgeo::extremal::required_cap;
use pshgeo::geodesics::{self, default_dual, default_samples};
use pshgeo::{grid, monge_ampere, rooftop, DualGridSpec};

fn err(e: pshgeo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "GridSpec", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGridSpec(pshgeo::GridSpec);

#[pymethods]
impl PyGridSpec {
    #[new]
    fn new(n: usize, radius: f64, samples: usize) -> PyResult<Self> {
        pshgeo::GridSpec::new(n, radius, samples).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }

    #[getter]
    fn samples(&self) -> usize {
        self.0.samples()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn axis_coords(&self) -> Vec<f64> {
        self.0.axis_coords()
    }

    /// Grid point with flat index `i` (axis 0 slowest).
    fn point(&self, i: usize) -> PyResult<Vec<f64>> {
        if i < self.0.len() {
            Ok(self.0.point(i))
        } else {
            Err(PyValueError::new_err(format!("index {i} out of range")))
        }
    }

    fn __repr__(&self) -> String {
        format!("GridSpec(n={}, radius={}, samples={})", self.0.n(), self.0.radius(), self.0.samples())
    }
}

#[pyclass(name = "GridFn", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGridFn(pshgeo::GridFn);

#[pymethods]
impl PyGridFn {
    /// Samples in row-major order, axis 0 slowest.
    #[staticmethod]
    fn from_values(spec: PyGridSpec, values: Vec<f64>) -> PyResult<Self> {
        pshgeo::GridFn::from_values(spec.0, values).map(Self).map_err(err)
    }

    /// `max_i <coef_i, s> + constant_i`.
    #[staticmethod]
    fn from_pieces(spec: PyGridSpec, pieces: Vec<(Vec<f64>, f64)>) -> PyResult<Self> {
        if pieces.is_empty() || pieces.iter().any(|(a, _)| a.len() != spec.0.n()) {
            return Err(PyValueError::new_err("pieces need one coefficient per dimension"));
        }
        let eval = |s: &[f64]| {
            pieces
                .iter()
                .map(|(a, b)| a.iter().zip(s).map(|(x, y)| x * y).sum::<f64>() + b)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        pshgeo::GridFn::build(spec.0, eval).map(Self).map_err(err)
    }

    #[getter]
    fn spec(&self) -> PyGridSpec {
        PyGridSpec(*self.0.spec())
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn value_near(&self, s: Vec<f64>) -> PyResult<f64> {
        if s.len() != self.0.spec().n() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.0.value_near(&s))
    }

    #[getter]
    fn is_convex(&self) -> bool {
        self.0.is_convex()
    }

    #[getter]
    fn is_monotone(&self) -> bool {
        self.0.is_monotone()
    }

    fn lipschitz(&self) -> f64 {
        self.0.lipschitz()
    }

    fn eps_conv(&self) -> f64 {
        self.0.eps_conv()
    }

    fn min(&self) -> f64 {
        self.0.min_value()
    }

    fn max(&self) -> f64 {
        self.0.max_value()
    }

    fn scaled(&self, c: f64) -> Self {
        Self(self.0.scaled(c))
    }

    fn shifted(&self, c: f64) -> Self {
        Self(self.0.shifted(c))
    }

    fn __repr__(&self) -> String {
        format!("GridFn(n={}, samples={})", self.0.spec().n(), self.0.spec().samples())
    }
}

#[pyclass(name = "ConvexBody", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConvexBody(pshgeo::ConvexBody);

#[pymethods]
impl PyConvexBody {
    /// Complete body generated by points with negative coordinates.
    #[new]
    fn new(generators: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = generators.first().map_or(0, Vec::len);
        pshgeo::ConvexBody::new(n, generators).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn generators(&self) -> Vec<Vec<f64>> {
        self.0.generators().to_vec()
    }

    fn reduced(&self) -> Self {
        Self(self.0.reduced())
    }

    fn support(&self, a: Vec<f64>) -> PyResult<f64> {
        self.0.support(&a).map_err(err)
    }

    fn contains(&self, s: Vec<f64>) -> bool {
        self.0.contains(&s)
    }

    fn distance(&self, s: Vec<f64>) -> f64 {
        self.0.distance(&s)
    }

    /// `(value, tolerance)` of the Reinhardt volume.
    fn volume(&self, spec: PyGridSpec) -> PyResult<(f64, f64)> {
        let v = self.0.volume(&spec.0).map_err(err)?;
        Ok((v.value, v.tolerance()))
    }
}

#[pyclass(name = "Geodesic", frozen)]
struct PyGeodesic(geodesics::GeodesicFamily);

#[pymethods]
impl PyGeodesic {
    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.0.samples().to_vec()
    }

    fn slice(&self, t: f64) -> PyResult<PyGridFn> {
        self.0.slice_at(t).map(PyGridFn).map_err(err)
    }

    fn eps_conv(&self) -> f64 {
        self.0.eps_conv()
    }

    /// `(t, E(u_t))` per sample.
    fn energy_profile(&self) -> PyResult<Vec<(f64, f64)>> {
        Ok(geodesics::energy_profile(&self.0).map_err(err)?.rows)
    }

    /// Capacity of the contact set `{u_t = min u_t}`.
    fn contact_capacity(&self, t: f64) -> PyResult<f64> {
        let c = geodesics::contact_set(&self.0, t).map_err(err)?;
        geodesics::contact_capacity(&c, self.0.spec()).map_err(err)
    }

    /// Largest violation of `V_t <= u_t <= (1 - t) u_0 + t u_1`.
    fn sandwich_violation(&self) -> PyResult<f64> {
        Ok(geodesics::sandwich_check(&self.0).map_err(err)?.max_violation())
    }
}

fn covering(body: &pshgeo::ConvexBody, spec: &pshgeo::GridSpec) -> DualGridSpec {
    DualGridSpec::covering(spec, required_cap(body))
}

#[pyfunction]
fn extremal_fn(body: &PyConvexBody, spec: PyGridSpec) -> PyResult<PyGridFn> {
    pshgeo::extremal::extremal_fn(&body.0, &spec.0, &covering(&body.0, &spec.0))
        .map(PyGridFn)
        .map_err(err)
}

#[pyfunction]
fn capacity(body: &PyConvexBody, spec: PyGridSpec) -> PyResult<f64> {
    monge_ampere::capacity(&body.0, &spec.0, &covering(&body.0, &spec.0)).map_err(err)
}

#[pyfunction]
fn interpolate_body(l0: &PyConvexBody, l1: &PyConvexBody, t: f64) -> PyResult<PyConvexBody> {
    pshgeo::bodies::interpolate_body(&l0.0, &l1.0, t).map(PyConvexBody).map_err(err)
}

#[pyfunction]
fn energy(f: &PyGridFn) -> PyResult<f64> {
    monge_ampere::energy(&f.0).map_err(err)
}

/// Total Monge-Ampere mass (Lebesgue measure of the gradient image).
#[pyfunction]
fn ma_total(f: &PyGridFn) -> PyResult<f64> {
    Ok(monge_ampere::ma_measure(&f.0).map_err(err)?.total())
}

#[pyfunction]
fn sup_distance(f: &PyGridFn, g: &PyGridFn) -> PyResult<f64> {
    grid::sup_distance(&f.0, &g.0).map_err(err)
}

#[pyfunction]
fn biconjugate(f: &PyGridFn) -> PyResult<PyGridFn> {
    grid::biconjugate(&f.0).map(PyGridFn).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (u0, u1, samples = None))]
fn geodesic(u0: &PyGridFn, u1: &PyGridFn, samples: Option<Vec<f64>>) -> PyResult<PyGeodesic> {
    let samples = samples.unwrap_or_else(default_samples);
    geodesics::geodesic(&u0.0, &u1.0, &samples, &default_dual(&u0.0, &u1.0))
        .map(PyGeodesic)
        .map_err(err)
}

#[pyfunction(name = "rooftop")]
fn rooftop_env(u: &PyGridFn, v: &PyGridFn) -> PyResult<PyGridFn> {
    rooftop::rooftop(&u.0, &v.0).map(PyGridFn).map_err(err)
}

#[pyfunction]
fn residual(phi: &PyGridFn) -> PyResult<PyGridFn> {
    Ok(PyGridFn(rooftop::residual(&phi.0, &rooftop::C_LIST).map_err(err)?.value))
}

/// Verdict and diagnostics as a dict.
#[pyfunction]
fn connectivity<'py>(py: Python<'py>, u0: &PyGridFn, u1: &PyGridFn) -> PyResult<Bound<'py, PyDict>> {
    let r = rooftop::connectivity(&u0.0, &u1.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict.as_str())?;
    d.set_item("residual_gap", r.residual_gap)?;
    d.set_item("tau_res", r.tau_res)?;
    d.set_item("defects", (r.defect0, r.defect1))?;
    d.set_item("endpoint_gaps", r.endpoint_gaps)?;
    d.set_item("stabilized", r.stabilized)?;
    Ok(d)
}

#[pymodule(name = "pshgeo")]
fn pshgeo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGridSpec>()?;
    m.add_class::<PyGridFn>()?;
    m.add_class::<PyConvexBody>()?;
    m.add_class::<PyGeodesic>()?;
    m.add_function(wrap_pyfunction!(extremal_fn, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate_body, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(ma_total, m)?)?;
    m.add_function(wrap_pyfunction!(sup_distance, m)?)?;
    m.add_function(wrap_pyfunction!(biconjugate, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(rooftop_env, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(connectivity, m)?)?;
    Ok(())
}
