//! Python bindings. The module is importable as `branchdim`.

use branchdim::gap::{self, GapCertificate, PeriodicOrbit};
use branchdim::measures::{self, BracketOptions, CylinderRule, ProbVector, ValueBracket};
use branchdim::optimizer::{self, MaximizeOptions, MaximizerResult};
use branchdim::system::{build_catalog, file, BranchedSystem, CatalogName, CatalogParams, Orientation, Word};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: branchdim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rule(name: &str) -> PyResult<CylinderRule> {
    match name {
        "combined" => Ok(CylinderRule::Combined),
        "orbit" => Ok(CylinderRule::Orbit),
        "coarse" => Ok(CylinderRule::Coarse),
        other => Err(PyValueError::new_err(format!("unknown rule '{other}'"))),
    }
}

fn prob(p: Vec<f64>) -> PyResult<ProbVector> {
    ProbVector::new(p).map_err(py_err)
}

#[pyclass(name = "System", frozen)]
struct PySystem(BranchedSystem);

#[pymethods]
impl PySystem {
    /// Catalog system: gauss, luroth, affine (needs `lengths`) or example_tangent.
    #[staticmethod]
    #[pyo3(signature = (name, lengths=None, reversing=false, tail_branches=None, prefix=None))]
    fn catalog(name: &str, lengths: Option<Vec<f64>>, reversing: bool, tail_branches: Option<usize>, prefix: Option<usize>) -> PyResult<Self> {
        let params = CatalogParams {
            lengths,
            orientation: Some(if reversing { Orientation::Reversing } else { Orientation::Preserving }),
            tail_branches,
            prefix,
        };
        let name: CatalogName = name.parse().map_err(py_err)?;
        build_catalog(name, &params).map(Self).map_err(py_err)
    }

    /// System described by a TOML file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        file::load_system_file(path).map(Self).map_err(py_err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn is_countable(&self) -> bool {
        self.0.is_countable()
    }

    fn apply(&self, x: f64) -> Option<f64> {
        self.0.apply(x)
    }

    fn __repr__(&self) -> String {
        format!("System({:?})", self.0.name())
    }
}

#[pyclass(name = "Bracket", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyBracket {
    lo: f64,
    hi: f64,
    depth: usize,
}

impl From<ValueBracket> for PyBracket {
    fn from(b: ValueBracket) -> Self {
        Self { lo: b.lo, hi: b.hi, depth: b.depth }
    }
}

#[pymethods]
impl PyBracket {
    #[getter]
    fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[getter]
    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn __contains__(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn __repr__(&self) -> String {
        format!("Bracket(lo={}, hi={}, depth={})", self.lo, self.hi, self.depth)
    }
}

#[pyclass(name = "Maximizer", frozen, get_all)]
struct PyMaximizer {
    p: Vec<f64>,
    dim: PyBracket,
    l: usize,
    depth: usize,
    kkt_residual: f64,
    iterations: usize,
    converged: bool,
}

impl From<MaximizerResult> for PyMaximizer {
    fn from(r: MaximizerResult) -> Self {
        Self {
            p: r.p_opt.weights().to_vec(),
            dim: r.dim.into(),
            l: r.l,
            depth: r.depth,
            kkt_residual: r.kkt_residual,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

#[pyclass(name = "PeriodicOrbit", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyOrbit {
    word: Vec<usize>,
    point: f64,
    cycle_log_derivative: f64,
    residual: f64,
    orbit: Vec<f64>,
}

impl From<PeriodicOrbit> for PyOrbit {
    fn from(o: PeriodicOrbit) -> Self {
        Self {
            word: o.word.symbols().to_vec(),
            point: o.point,
            cycle_log_derivative: o.cycle_log_derivative,
            residual: o.residual,
            orbit: o.orbit,
        }
    }
}

#[pymethods]
impl PyOrbit {
    #[getter]
    fn derivative(&self) -> f64 {
        self.cycle_log_derivative.exp()
    }
}

#[pyclass(name = "GapCertificate", frozen, get_all)]
struct PyCertificate {
    orbit_a: PyOrbit,
    orbit_b: PyOrbit,
    derivative_gap: f64,
    error_bound: f64,
    valid: bool,
    json: String,
}

impl From<GapCertificate> for PyCertificate {
    fn from(c: GapCertificate) -> Self {
        let json = c.to_json();
        Self {
            orbit_a: c.orbit_a.into(),
            orbit_b: c.orbit_b.into(),
            derivative_gap: c.derivative_gap,
            error_bound: c.error_bound,
            valid: c.valid,
            json,
        }
    }
}

#[pyfunction]
#[pyo3(signature = (system, p, depth, rule="combined"))]
fn lyapunov_bracket(system: &PySystem, p: Vec<f64>, depth: usize, rule: &str) -> PyResult<PyBracket> {
    let opts = BracketOptions::with_rule(self::rule(rule)?);
    measures::lyapunov_bracket_with(&system.0, &prob(p)?, depth, &opts).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (system, p, depth, rule="combined"))]
fn dimension_bracket(system: &PySystem, p: Vec<f64>, depth: usize, rule: &str) -> PyResult<PyBracket> {
    let opts = BracketOptions::with_rule(self::rule(rule)?);
    measures::dimension_bracket_with(&system.0, &prob(p)?, depth, &opts).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn entropy(p: Vec<f64>) -> PyResult<f64> {
    Ok(measures::entropy(&prob(p)?))
}

#[pyfunction]
#[pyo3(signature = (system, l, depth, seeds=5, seed=0x5eed))]
fn maximize_dimension(py: Python<'_>, system: &PySystem, l: usize, depth: usize, seeds: usize, seed: u64) -> PyResult<PyMaximizer> {
    let opts = MaximizeOptions { seeds, seed, ..MaximizeOptions::default() };
    py.detach(|| optimizer::maximize_dimension(&system.0, l, depth, &opts)).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn moran_root(lengths: Vec<f64>) -> PyResult<f64> {
    optimizer::moran_root(&lengths).map_err(py_err)
}

#[pyfunction]
fn periodic_point(system: &PySystem, word: Vec<usize>) -> PyResult<PyOrbit> {
    let word = Word::new(word).map_err(py_err)?;
    gap::periodic_point(&system.0, &word).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (system, max_symbol=3, max_len=3, tol=1e-6))]
fn certificate_search(py: Python<'_>, system: &PySystem, max_symbol: usize, max_len: usize, tol: f64) -> PyResult<Option<PyCertificate>> {
    py.detach(|| gap::certificate_search(&system.0, max_symbol, max_len, tol))
        .map(|c| c.map(Into::into))
        .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "branchdim")]
fn branchdim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyBracket>()?;
    m.add_class::<PyMaximizer>()?;
    m.add_class::<PyOrbit>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(lyapunov_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(maximize_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(moran_root, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_point, m)?)?;
    m.add_function(wrap_pyfunction!(certificate_search, m)?)?;
    Ok(())
}
