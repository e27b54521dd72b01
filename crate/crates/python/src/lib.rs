//! Python bindings for nlgeo.
//!
//! Distance kinds are passed as their short tags (`"hs"`, `"he"`, `"bu"`,
//! `"tr"`, `"re"`); density matrices as nested lists of complex numbers.

use nlgeo_core::measures::SweepFamily;
use nlgeo_core::metrics::measure_functional;
use nlgeo_core::state::{make_isotropic, make_werner};
use nlgeo_core::{ClosestLocal, DensityMatrix, DistanceKind, Error};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    nlgeo,
    NonPhysicalError,
    PyValueError,
    "Input lies outside the set of physical states."
);
create_exception!(
    nlgeo,
    NotConvergedError,
    PyRuntimeError,
    "The minimiser hit its iteration cap."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonPhysical(_) | Error::InvalidProbability(_) | Error::NotPsd(_) => {
            NonPhysicalError::new_err(e.to_string())
        }
        Error::NotConverged(_) => NotConvergedError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn kind(tag: &str) -> PyResult<DistanceKind> {
    tag.parse().map_err(to_py)
}

fn rows(rho: &DensityMatrix) -> Vec<Vec<Complex64>> {
    let m = rho.matrix();
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn density(rows: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("density matrix must be square"));
    }
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(PyValueError::new_err(format!(
            "size {n} is not d*d for a bipartite state"
        )));
    }
    let m = nlgeo_core::linalg::CMatrix::from_fn(n, n, |i, j| rows[i][j]);
    DensityMatrix::new(d, m).map_err(to_py)
}

/// Minimiser settings; defaults match the library.
#[pyclass(name = "OptimizerConfig", from_py_object)]
#[derive(Clone)]
struct PyOptimizerConfig {
    #[pyo3(get, set)]
    param_tol: f64,
    #[pyo3(get, set)]
    value_tol: f64,
    #[pyo3(get, set)]
    max_iters: usize,
    #[pyo3(get, set)]
    seeds: usize,
    #[pyo3(get, set)]
    penalty_growth: f64,
    #[pyo3(get, set)]
    rng_seed: u64,
}

impl From<nlgeo_core::OptimizerConfig> for PyOptimizerConfig {
    fn from(c: nlgeo_core::OptimizerConfig) -> Self {
        Self {
            param_tol: c.param_tol,
            value_tol: c.value_tol,
            max_iters: c.max_iters,
            seeds: c.seeds,
            penalty_growth: c.penalty_growth,
            rng_seed: c.rng_seed,
        }
    }
}

impl PyOptimizerConfig {
    fn core(&self) -> nlgeo_core::OptimizerConfig {
        nlgeo_core::OptimizerConfig {
            param_tol: self.param_tol,
            value_tol: self.value_tol,
            max_iters: self.max_iters,
            seeds: self.seeds,
            penalty_growth: self.penalty_growth,
            rng_seed: self.rng_seed,
        }
    }
}

#[pymethods]
impl PyOptimizerConfig {
    #[new]
    #[pyo3(signature = (*, param_tol=None, value_tol=None, max_iters=None, seeds=None, penalty_growth=None, rng_seed=None))]
    fn new(
        param_tol: Option<f64>,
        value_tol: Option<f64>,
        max_iters: Option<usize>,
        seeds: Option<usize>,
        penalty_growth: Option<f64>,
        rng_seed: Option<u64>,
    ) -> PyResult<Self> {
        let d = nlgeo_core::OptimizerConfig::default();
        let c = nlgeo_core::OptimizerConfig {
            param_tol: param_tol.unwrap_or(d.param_tol),
            value_tol: value_tol.unwrap_or(d.value_tol),
            max_iters: max_iters.unwrap_or(d.max_iters),
            seeds: seeds.unwrap_or(d.seeds),
            penalty_growth: penalty_growth.unwrap_or(d.penalty_growth),
            rng_seed: rng_seed.unwrap_or(d.rng_seed),
        };
        c.validate().map_err(to_py)?;
        Ok(c.into())
    }

    fn __repr__(&self) -> String {
        format!(
            "OptimizerConfig(param_tol={}, value_tol={}, max_iters={}, seeds={}, penalty_growth={}, rng_seed={})",
            self.param_tol, self.value_tol, self.max_iters, self.seeds, self.penalty_growth, self.rng_seed
        )
    }
}

fn config(c: Option<PyOptimizerConfig>) -> nlgeo_core::OptimizerConfig {
    c.map_or_else(Default::default, |c| c.core())
}

/// Outcome of one measure evaluation.
#[pyclass(name = "MeasureResult", frozen, skip_from_py_object)]
struct PyMeasureResult {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    surface: Option<String>,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    residual: f64,
    /// Correlators of the closest local state, when it is two-qubit.
    #[pyo3(get)]
    closest_correlators: Option<(f64, f64, f64)>,
    closest: ClosestLocal,
}

impl From<nlgeo_core::MeasureResult> for PyMeasureResult {
    fn from(r: nlgeo_core::MeasureResult) -> Self {
        Self {
            kind: r.kind.tag().to_owned(),
            value: r.value,
            method: r.method.tag().to_owned(),
            surface: r.surface.map(|s| s.label()),
            iterations: r.iterations,
            converged: r.converged,
            residual: r.residual,
            closest_correlators: r.closest_local.correlators().map(|[a, b, c]| (a, b, c)),
            closest: r.closest_local,
        }
    }
}

#[pymethods]
impl PyMeasureResult {
    /// Density matrix of the closest local state.
    fn closest_density(&self) -> Vec<Vec<Complex64>> {
        rows(&self.closest.density())
    }

    fn __repr__(&self) -> String {
        format!(
            "MeasureResult(kind='{}', value={}, method='{}', converged={})",
            self.kind,
            self.value,
            self.method,
            if self.converged { "True" } else { "False" }
        )
    }
}

#[pyfunction]
fn werner_measure(kind_tag: &str, w: f64) -> PyResult<PyMeasureResult> {
    nlgeo_core::werner_measure(kind(kind_tag)?, w)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn werner_maximum(kind_tag: &str) -> PyResult<f64> {
    Ok(nlgeo_core::werner_maximum(kind(kind_tag)?))
}

/// Returns `(result, printed, consistent)`; the last two are `None` where the
/// printed expression does not apply.
#[pyfunction]
fn isotropic_measure(
    kind_tag: &str,
    d: usize,
    omega: f64,
) -> PyResult<(PyMeasureResult, Option<f64>, Option<bool>)> {
    let m = nlgeo_core::isotropic_measure(kind(kind_tag)?, d, omega).map_err(to_py)?;
    Ok((m.result.into(), m.printed, m.consistent))
}

#[pyfunction]
#[pyo3(signature = (kind_tag, a, config=None))]
fn bd_measure(
    kind_tag: &str,
    a: [f64; 3],
    config: Option<PyOptimizerConfig>,
) -> PyResult<PyMeasureResult> {
    let cfg = self::config(config);
    nlgeo_core::bd_measure(kind(kind_tag)?, a, &cfg)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn bd_is_chsh_local(a: [f64; 3]) -> PyResult<bool> {
    nlgeo_core::bd_is_chsh_local(a).map_err(to_py)
}

#[pyfunction]
fn bd_probs_to_corr(e: [f64; 4]) -> PyResult<[f64; 3]> {
    nlgeo_core::state::bd_probs_to_corr(e).map_err(to_py)
}

#[pyfunction]
fn bd_corr_to_probs(a: [f64; 3]) -> [f64; 4] {
    nlgeo_core::state::bd_corr_to_probs(a)
}

/// `(I_d, omega_threshold)` for the CGLMP inequality.
#[pyfunction]
fn cglmp_threshold(d: usize) -> PyResult<(f64, f64)> {
    let t = nlgeo_core::cglmp_threshold(d).map_err(to_py)?;
    Ok((t.i_d_qm, t.omega_threshold))
}

/// Rows `(param, value, normalized)` over `"two_bell_mix"` or `"werner_line"`.
#[pyfunction]
#[pyo3(signature = (kind_tag, family, n, config=None))]
fn bd_sweep(
    kind_tag: &str,
    family: &str,
    n: usize,
    config: Option<PyOptimizerConfig>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let family: SweepFamily = family.parse().map_err(to_py)?;
    let pts =
        nlgeo_core::bd_sweep(kind(kind_tag)?, family, n, &self::config(config)).map_err(to_py)?;
    Ok(pts
        .into_iter()
        .map(|p| (p.param, p.result.value, p.normalized))
        .collect())
}

/// Rows `(e1, e2, e3, normalized)` of the e4 = 0 slice.
#[pyfunction]
#[pyo3(signature = (kind_tag, grid_n, config=None))]
fn bd_grid(
    kind_tag: &str,
    grid_n: usize,
    config: Option<PyOptimizerConfig>,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let pts = nlgeo_core::bd_grid(kind(kind_tag)?, grid_n, &self::config(config)).map_err(to_py)?;
    Ok(pts
        .into_iter()
        .map(|p| (p.e1, p.e2, p.e3, p.normalized))
        .collect())
}

/// The functional behind a measure: HS and trace distance, squared
/// Hellinger/Bures distance, or relative entropy in bits.
#[pyfunction]
fn distance(kind_tag: &str, rho: Vec<Vec<Complex64>>, sigma: Vec<Vec<Complex64>>) -> PyResult<f64> {
    measure_functional(kind(kind_tag)?, &density(rho)?, &density(sigma)?).map_err(to_py)
}

#[pyfunction]
fn werner_state(w: f64) -> PyResult<Vec<Vec<Complex64>>> {
    make_werner(w).map(|r| rows(&r)).map_err(to_py)
}

#[pyfunction]
fn isotropic_state(d: usize, omega: f64) -> PyResult<Vec<Vec<Complex64>>> {
    make_isotropic(d, omega).map(|r| rows(&r)).map_err(to_py)
}

#[pymodule]
fn nlgeo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NonPhysicalError", m.py().get_type::<NonPhysicalError>())?;
    m.add("NotConvergedError", m.py().get_type::<NotConvergedError>())?;
    m.add("WERNER_THRESHOLD", nlgeo_core::WERNER_THRESHOLD)?;
    m.add_class::<PyOptimizerConfig>()?;
    m.add_class::<PyMeasureResult>()?;
    m.add_function(wrap_pyfunction!(werner_measure, m)?)?;
    m.add_function(wrap_pyfunction!(werner_maximum, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic_measure, m)?)?;
    m.add_function(wrap_pyfunction!(bd_measure, m)?)?;
    m.add_function(wrap_pyfunction!(bd_is_chsh_local, m)?)?;
    m.add_function(wrap_pyfunction!(bd_probs_to_corr, m)?)?;
    m.add_function(wrap_pyfunction!(bd_corr_to_probs, m)?)?;
    m.add_function(wrap_pyfunction!(cglmp_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(bd_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(bd_grid, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(werner_state, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic_state, m)?)?;
    Ok(())
}
