//! Python bindings: the isometry group, prism tilings, geodesic
//! distances, ball volumes and packing optimization, with plain tuples
//! and dicts at the boundary.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nilpack::{NilError, NilIsometry, NilPoint, NilTranslation, PackingResult, PrismTiling};

fn to_py_err(e: NilError) -> PyErr {
    match e {
        NilError::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn point(p: (f64, f64, f64)) -> NilPoint {
    NilPoint::new(p.0, p.1, p.2)
}

fn tuple(p: NilPoint) -> (f64, f64, f64) {
    (p.a, p.b, p.c)
}

fn packing_dict<'py>(py: Python<'py>, r: &PackingResult) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("r_opt", r.r_opt)?;
    dict.set_item("prism_volume", r.prism_volume)?;
    dict.set_item("density", r.density)?;
    dict.set_item("kissing", r.kissing)?;
    Ok(dict)
}

/// A direct isometry: rotation about the origin fibre followed by a
/// translation.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Isometry {
    inner: NilIsometry,
}

#[pymethods]
impl Isometry {
    #[staticmethod]
    fn identity() -> Self {
        Isometry { inner: NilIsometry::IDENTITY }
    }

    #[staticmethod]
    fn rotation(omega: f64) -> Self {
        Isometry { inner: NilIsometry::rotation(omega) }
    }

    #[staticmethod]
    fn translation(x: f64, y: f64, z: f64) -> Self {
        Isometry { inner: NilIsometry::translation(NilTranslation::new(x, y, z)) }
    }

    #[staticmethod]
    fn rotation_about_fibre(centre: (f64, f64, f64), omega: f64) -> Self {
        Isometry { inner: NilIsometry::rotation_about_fibre(point(centre), omega) }
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    /// Translation part as an (x, y, z) tuple.
    #[getter]
    fn trans(&self) -> (f64, f64, f64) {
        let t = self.inner.trans;
        (t.x, t.y, t.z)
    }

    fn apply(&self, p: (f64, f64, f64)) -> (f64, f64, f64) {
        tuple(self.inner.apply(point(p)))
    }

    /// Composition: self first, then `other`.
    fn then(&self, other: &Isometry) -> Isometry {
        Isometry { inner: self.inner.then(other.inner) }
    }

    fn inverse(&self) -> Isometry {
        Isometry { inner: self.inner.inverse() }
    }

    fn __repr__(&self) -> String {
        let t = self.inner.trans;
        format!("Isometry(omega={:?}, trans=({:?}, {:?}, {:?}))", self.inner.omega, t.x, t.y, t.z)
    }
}

/// One tiling of cells with p-gonal base, q cells around each vertex
/// fibre, and base circumradius x.
#[pyclass(frozen)]
struct Tiling {
    inner: PrismTiling,
}

#[pymethods]
impl Tiling {
    #[new]
    fn new(p: u32, q: u32, x: f64) -> PyResult<Self> {
        Ok(Tiling { inner: PrismTiling::build(p, q, x).map_err(to_py_err)? })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x()
    }

    fn gen_a(&self) -> Isometry {
        Isometry { inner: self.inner.gen_a() }
    }

    fn gen_b(&self) -> Isometry {
        Isometry { inner: self.inner.gen_b() }
    }

    /// The screw translation tau = (ab)^2.
    fn tau(&self) -> Isometry {
        Isometry { inner: self.inner.tau() }
    }

    fn base_vertices(&self) -> Vec<(f64, f64, f64)> {
        self.inner.base_vertices().iter().copied().map(tuple).collect()
    }

    fn top_vertices(&self) -> Vec<(f64, f64, f64)> {
        self.inner.top_vertices().into_iter().map(tuple).collect()
    }

    fn fibre_displacement(&self) -> f64 {
        self.inner.fibre_displacement()
    }

    fn prism_volume(&self) -> f64 {
        self.inner.prism_volume()
    }

    fn prism_height(&self) -> PyResult<f64> {
        self.inner.prism_height().map_err(to_py_err)
    }

    /// Largest deviation over the group relations, measured on `samples`
    /// seeded random points.
    #[pyo3(signature = (samples = 100, seed = 1))]
    fn relation_deviation(&self, samples: usize, seed: u64) -> f64 {
        self.inner.verify_relations(samples, seed).max_deviation()
    }

    /// Orbit of the origin up to the given word length, origin excluded,
    /// sorted by distance.
    fn orbit_points(&self, depth: u32) -> Vec<(f64, f64, f64)> {
        self.inner.orbit(depth).into_iter().map(|o| tuple(o.point)).collect()
    }

    fn kissing_number(&self, r: f64) -> PyResult<u32> {
        nilpack::kissing_number(&self.inner, r).map_err(to_py_err)
    }

    /// Packing at the optimal radius of this cell, as a dict with keys
    /// r_opt, prism_volume, density and kissing.
    fn packing<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let result = nilpack::packing_density(&self.inner).map_err(to_py_err)?;
        packing_dict(py, &result)
    }

    fn __repr__(&self) -> String {
        format!("Tiling(p={}, q={}, x={:?})", self.inner.p(), self.inner.q(), self.inner.x())
    }
}

#[pyfunction]
fn tiling_exists(p: u32, q: u32) -> bool {
    nilpack::tiling_exists(p, q)
}

#[pyfunction]
fn distance(p1: (f64, f64, f64), p2: (f64, f64, f64)) -> PyResult<f64> {
    Ok(nilpack::distance(point(p1), point(p2)).map_err(to_py_err)?.length)
}

#[pyfunction]
fn ball_volume(radius: f64) -> PyResult<f64> {
    nilpack::ball_volume(radius).map_err(to_py_err)
}

#[pyfunction]
fn geodesic_point(alpha: f64, theta: f64, t: f64) -> (f64, f64, f64) {
    tuple(nilpack::geodesic_point(alpha, theta, t))
}

#[pyfunction]
fn sphere_point(radius: f64, theta: f64, phi: f64) -> PyResult<(f64, f64, f64)> {
    nilpack::sphere_point(radius, theta, phi).map(tuple).map_err(to_py_err)
}

/// Balanced cell and its optimal packing, as a dict with keys x_star,
/// r_opt, prism_volume, density and kissing.
#[pyfunction]
#[pyo3(signature = (p, q, tol = None))]
fn solve_balanced<'py>(py: Python<'py>, p: u32, q: u32, tol: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let sol = nilpack::solve_balanced(p, q, tol).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("x_star", sol.x_star)?;
    for (key, value) in packing_dict(py, &sol.result)?.iter() {
        dict.set_item(key, value)?;
    }
    Ok(dict)
}

#[pymodule]
fn nilpack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Isometry>()?;
    m.add_class::<Tiling>()?;
    m.add_function(wrap_pyfunction!(tiling_exists, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_point, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_point, m)?)?;
    m.add_function(wrap_pyfunction!(solve_balanced, m)?)?;
    m.add("MAX_SPHERE_RADIUS", nilpack::MAX_SPHERE_RADIUS)?;
    Ok(())
}
