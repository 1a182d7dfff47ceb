//! Python bindings. Matrices cross the boundary as nested lists of `complex`,
//! algebra elements as a list of square blocks.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use aluthge_core::aluthge::{self as transform, Lambda};
use aluthge_core::harness::{self, SuiteConfig};
use aluthge_core::linalg::polar_decompose;
use aluthge_core::{AlgElem, CMatrix, Error, PreserverMap, TolerancePolicy, VNAlgebra, C64};

type Rows = Vec<Vec<C64>>;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoConvergence(_) | Error::NonFinite => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tolerance(eq_tol: Option<f64>) -> PyResult<TolerancePolicy> {
    match eq_tol {
        Some(t) => TolerancePolicy::default().with_eq_tol(t).map_err(to_py),
        None => Ok(TolerancePolicy::default()),
    }
}

fn matrix_from_rows(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    CMatrix::new(n, m, rows.iter().flatten().copied().collect()).map_err(to_py)
}

fn rows_from_matrix(m: &CMatrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Element of a direct sum of full matrix blocks.
#[pyclass(name = "Element", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElement {
    inner: AlgElem,
}

#[pymethods]
impl PyElement {
    #[new]
    fn new(blocks: Vec<Rows>) -> PyResult<Self> {
        let mats: Vec<CMatrix> = blocks.iter().map(matrix_from_rows).collect::<PyResult<_>>()?;
        let dims = mats.iter().map(CMatrix::rows).collect();
        let alg = VNAlgebra::new(dims).map_err(to_py)?;
        Ok(Self { inner: AlgElem::new(alg, mats).map_err(to_py)? })
    }

    #[staticmethod]
    fn identity(block_dims: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: VNAlgebra::new(block_dims).map_err(to_py)?.identity() })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: harness::parse_element(text).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        harness::write_element(&self.inner)
    }

    #[getter]
    fn block_dims(&self) -> Vec<usize> {
        self.inner.algebra().block_dims().to_vec()
    }

    fn blocks(&self) -> Vec<Rows> {
        self.inner.blocks().iter().map(rows_from_matrix).collect()
    }

    fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.mul(&other.inner).map_err(to_py)? })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.add(&other.inner).map_err(to_py)? })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.sub(&other.inner).map_err(to_py)? })
    }

    fn scale(&self, alpha: C64) -> Self {
        Self { inner: self.inner.scale(alpha) }
    }

    fn trace(&self) -> C64 {
        self.inner.trace()
    }

    fn fro_norm(&self) -> f64 {
        self.inner.fro_norm()
    }

    #[pyo3(signature = (other, eq_tol=None))]
    fn approx_eq(&self, other: &Self, eq_tol: Option<f64>) -> PyResult<bool> {
        Ok(self.inner.approx_eq(&other.inner, &tolerance(eq_tol)?))
    }

    fn quasinormal_residual(&self) -> f64 {
        transform::quasinormal_residual(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Element(block_dims={:?})", self.inner.algebra().block_dims())
    }
}

/// A named preserver map, built from its JSON description (`{"kind": ...}`).
#[pyclass(name = "PreserverMap", frozen)]
struct PyPreserverMap {
    inner: PreserverMap,
}

#[pymethods]
impl PyPreserverMap {
    #[staticmethod]
    #[pyo3(signature = (text, eq_tol=None))]
    fn from_json(text: &str, eq_tol: Option<f64>) -> PyResult<Self> {
        let inner: PreserverMap = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate(&tolerance(eq_tol)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn unitary_conj(v: &PyElement) -> PyResult<Self> {
        let inner = PreserverMap::unitary_conj(v.inner.clone(), &TolerancePolicy::default()).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn conj_linear_conj(v: &PyElement) -> PyResult<Self> {
        let inner = PreserverMap::conj_linear_conj(v.inner.clone(), &TolerancePolicy::default()).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("map is serializable")
    }

    fn __call__(&self, a: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.apply(&a.inner).map_err(to_py)? })
    }
}

/// λ-Aluthge transform of an element.
#[pyfunction]
#[pyo3(name = "aluthge", signature = (a, lam, eq_tol=None))]
fn transform_element(a: &PyElement, lam: f64, eq_tol: Option<f64>) -> PyResult<PyElement> {
    let tol = tolerance(eq_tol)?;
    let lam = Lambda::new(lam).map_err(to_py)?;
    Ok(PyElement { inner: transform::aluthge(&a.inner, lam, &tol).map_err(to_py)? })
}

/// λ-Aluthge transform of a single square matrix.
#[pyfunction]
#[pyo3(signature = (a, lam, eq_tol=None))]
fn aluthge_matrix(a: Rows, lam: f64, eq_tol: Option<f64>) -> PyResult<Rows> {
    let tol = tolerance(eq_tol)?;
    let lam = Lambda::new(lam).map_err(to_py)?;
    let m = matrix_from_rows(&a)?;
    Ok(rows_from_matrix(&transform::aluthge_matrix(&m, lam, &tol).map_err(to_py)?))
}

/// Returns `(u, |a|)` with `u` a partial isometry.
#[pyfunction]
fn polar(a: Rows) -> PyResult<(Rows, Rows)> {
    let m = matrix_from_rows(&a)?;
    let p = polar_decompose(&m, &TolerancePolicy::default()).map_err(to_py)?;
    Ok((rows_from_matrix(&p.u), rows_from_matrix(&p.modulus)))
}

#[pyfunction]
#[pyo3(signature = (a, lam, steps, eq_tol=None))]
fn orbit(a: &PyElement, lam: f64, steps: usize, eq_tol: Option<f64>) -> PyResult<Vec<PyElement>> {
    let tol = tolerance(eq_tol)?;
    let lam = Lambda::new(lam).map_err(to_py)?;
    let out = transform::aluthge_orbit(&a.inner, lam, steps, &tol).map_err(to_py)?;
    Ok(out.into_iter().map(|inner| PyElement { inner }).collect())
}

/// Runs the seeded suite and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (seed, suite=vec!["all".to_string()], profiles=None, trials=None))]
fn verify(seed: u64, suite: Vec<String>, profiles: Option<Vec<Vec<usize>>>, trials: Option<usize>) -> PyResult<String> {
    let mut config = SuiteConfig::with_seed(seed);
    if let Some(p) = profiles {
        config.block_profiles = p;
    }
    if let Some(t) = trials {
        config.trials_per_property = t;
    }
    Ok(harness::run_suite(&config, &suite).map_err(to_py)?.to_json())
}

#[pyfunction]
fn list_properties() -> Vec<&'static str> {
    harness::properties().iter().map(|p| p.id).collect()
}

#[pymodule]
fn aluthge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyElement>()?;
    m.add_class::<PyPreserverMap>()?;
    m.add_function(wrap_pyfunction!(transform_element, m)?)?;
    m.add_function(wrap_pyfunction!(aluthge_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(polar, m)?)?;
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(list_properties, m)?)?;
    Ok(())
}
