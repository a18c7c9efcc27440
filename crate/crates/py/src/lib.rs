//! Python bindings for the discord library.

use discord_core::correlations::{self, CorrelationReport};
use discord_core::linalg::{self, ComplexMatrix};
use discord_core::measurement::{self, VonNeumannMeasurement};
use discord_core::optimizer::{Method, OptimizerConfig, OracleResult};
use discord_core::runner::{self, Family, OmegaLine, RunConfig, SweepSpec};
use discord_core::states::{self, StateFile, FILE_TOL};
use discord_core::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: discord_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A validated bipartite density matrix.
#[pyclass(name = "DensityMatrix", module = "qdiscord")]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Builds a state from row-major real and imaginary parts.
    #[new]
    #[pyo3(signature = (re, im, dims, tolerance = FILE_TOL))]
    fn new(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>, dims: (usize, usize), tolerance: f64) -> PyResult<Self> {
        let file = StateFile {
            dims: [dims.0, dims.1],
            re,
            im,
        };
        Ok(Self {
            inner: file.to_state(tolerance).map_err(err)?,
        })
    }

    #[staticmethod]
    fn werner(a: f64) -> PyResult<Self> {
        Ok(Self {
            inner: states::werner(a).map_err(err)?,
        })
    }

    #[staticmethod]
    fn mixed_bell(a: f64) -> PyResult<Self> {
        Ok(Self {
            inner: states::mixed_bell_family(a).map_err(err)?,
        })
    }

    #[staticmethod]
    fn bell_diagonal(omega: [f64; 3]) -> PyResult<Self> {
        Ok(Self {
            inner: states::bell_diagonal(omega).map_err(err)?,
        })
    }

    #[staticmethod]
    fn tabulated_random() -> Self {
        Self {
            inner: states::tabulated_random_state().state,
        }
    }

    #[staticmethod]
    #[pyo3(signature = (json, tolerance = FILE_TOL))]
    fn from_json(json: &str, tolerance: f64) -> PyResult<Self> {
        Ok(Self {
            inner: StateFile::parse(json).and_then(|f| f.to_state(tolerance)).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        StateFile::from_state(&self.inner).to_json()
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    /// (re, im) as nested lists.
    fn to_lists(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let f = StateFile::from_state(&self.inner);
        (f.re, f.im)
    }

    fn entropy(&self) -> PyResult<f64> {
        self.inner.entropy().map_err(err)
    }

    fn mutual_information(&self) -> PyResult<f64> {
        correlations::mutual_information(&self.inner).map_err(err)
    }

    /// Conditional entropy after the measurement with hyperspherical angles `phi`.
    fn conditional_entropy(&self, phi: [f64; 3]) -> PyResult<f64> {
        measurement::conditional_entropy(&self.inner, &VonNeumannMeasurement::from_angles(phi)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dims={:?})", self.inner.dims())
    }
}

fn optimizer_config(
    method: &str,
    eta: f64,
    tol: f64,
    max_iter: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        method: method.parse::<Method>().map_err(err)?,
        eta,
        tol,
        max_iter,
        restarts,
        seed,
        ..Default::default()
    };
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

fn report_dict<'py>(py: Python<'py>, r: &CorrelationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mutual_information", r.mutual_information)?;
    d.set_item("classical_correlation", r.classical_correlation)?;
    d.set_item("discord", r.discord)?;
    d.set_item("min_conditional_entropy", r.min_conditional_entropy)?;
    d.set_item("min_conditional_entropy_nats", r.min_conditional_entropy_nats)?;
    d.set_item("optimal_r", r.optimal_measurement.r)?;
    d.set_item("optimal_y", r.optimal_measurement.y.to_vec())?;
    d.set_item("optimal_direction", r.optimal_direction.to_vec())?;
    d.set_item("iterations", r.stats.iterations)?;
    d.set_item("starts", r.stats.starts)?;
    d.set_item("converged", r.stats.converged)?;
    d.set_item("bell_fast_path", r.stats.bell_fast_path)?;
    d.set_item("oracle_min", r.stats.oracle_min)?;
    d.set_item("oracle_gap", r.stats.oracle_gap)?;
    Ok(d)
}

fn oracle_dict<'py>(py: Python<'py>, o: &OracleResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("grid_min", o.grid_min)?;
    d.set_item("refined_min", o.refined_min)?;
    d.set_item("direction", o.direction.to_vec())?;
    d.set_item("evaluations", o.evaluations)?;
    Ok(d)
}

/// Mutual information, classical correlation and discord, in bits.
#[pyfunction]
#[pyo3(signature = (state, method = "nelder_mead", eta = 0.05, tol = 1e-8, max_iter = 5000, restarts = 8, seed = 42, oracle_resolution = None))]
#[allow(clippy::too_many_arguments)]
fn quantum_discord<'py>(
    py: Python<'py>,
    state: &PyDensityMatrix,
    method: &str,
    eta: f64,
    tol: f64,
    max_iter: usize,
    restarts: usize,
    seed: u64,
    oracle_resolution: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = optimizer_config(method, eta, tol, max_iter, restarts, seed)?;
    let report = match oracle_resolution {
        Some(res) => correlations::quantum_discord_with_oracle(&state.inner, &cfg, res),
        None => correlations::quantum_discord(&state.inner, &cfg),
    }
    .map_err(err)?;
    report_dict(py, &report)
}

/// Brute-force grid minimum of the conditional entropy.
#[pyfunction]
#[pyo3(signature = (state, resolution = 200))]
fn grid_oracle<'py>(py: Python<'py>, state: &PyDensityMatrix, resolution: usize) -> PyResult<Bound<'py, PyDict>> {
    let o = runner::oracle_for_state(&state.inner, resolution).map_err(err)?;
    oracle_dict(py, &o)
}

/// Sweeps a built-in family and returns the CSV text.
#[pyfunction]
#[pyo3(signature = (family, start, end, step, omega_offset = None, omega_slope = None, oracle_resolution = None, seed = 42))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    family: &str,
    start: f64,
    end: f64,
    step: f64,
    omega_offset: Option<[f64; 3]>,
    omega_slope: Option<[f64; 3]>,
    oracle_resolution: Option<usize>,
    seed: u64,
) -> PyResult<String> {
    let family: Family = family.parse().map_err(err)?;
    let omega = (omega_offset.is_some() || omega_slope.is_some()).then(|| {
        let d = OmegaLine::default();
        OmegaLine {
            offset: omega_offset.unwrap_or(d.offset),
            slope: omega_slope.unwrap_or(d.slope),
        }
    });
    let spec = SweepSpec {
        family,
        param_start: start,
        param_end: end,
        param_step: step,
        omega,
    };
    let mut cfg = RunConfig {
        oracle: oracle_resolution.is_some(),
        ..Default::default()
    };
    cfg.optimizer.seed = seed;
    if let Some(res) = oracle_resolution {
        cfg.oracle_resolution = res;
    }
    let rows = runner::run_sweep(&spec, &cfg).map_err(err)?;
    Ok(runner::sweep_csv(&rows))
}

/// h(x) = −x log₂ x − (1−x) log₂(1−x).
#[pyfunction]
fn binary_entropy(x: f64) -> PyResult<f64> {
    linalg::binary_entropy(x).map_err(err)
}

/// Von Neumann entropy in bits of a Hermitian matrix given as (re, im) lists.
#[pyfunction]
fn von_neumann_entropy(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> PyResult<f64> {
    let n = re.len();
    if im.len() != n || re.iter().chain(&im).any(|row| row.len() != n) {
        return Err(PyValueError::new_err("re and im must be square and of equal size"));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im[i][j]));
    linalg::von_neumann_entropy(&m).map_err(err)
}

/// Bloch direction of Π₀ for the measurement with hyperspherical angles `phi`.
#[pyfunction]
fn measurement_direction(phi: [f64; 3]) -> [f64; 3] {
    VonNeumannMeasurement::from_angles(phi).bloch_direction()
}

#[pymodule]
fn qdiscord(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(quantum_discord, m)?)?;
    m.add_function(wrap_pyfunction!(grid_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(measurement_direction, m)?)?;
    Ok(())
}
