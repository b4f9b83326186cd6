//! Python bindings. Matrices cross the boundary as lists of rows; experiment
//! configs and reports cross it as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use subspace_rip::montecarlo::{run_experiment as run, ExperimentConfig, RunOptions};
use subspace_rip::{estimators, DMatrix, PairParams, PairSpec, Subspace};

type Rows = Vec<Vec<f64>>;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("expected a non-empty rectangular list of rows"));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, rows.iter().flatten().copied()))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn subspace(rows: &[Vec<f64>]) -> PyResult<Subspace> {
    Subspace::from_columns(&to_matrix(rows)?).map_err(value_error)
}

/// Cosines of the principal angles, largest first.
#[pyfunction]
fn principal_cosines(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let s = subspace_rip::principal_angles(&subspace(&a)?, &subspace(&b)?).map_err(value_error)?;
    Ok(s.cosines().to_vec())
}

#[pyfunction]
fn affinity(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<f64> {
    subspace_rip::affinity(&subspace(&a)?, &subspace(&b)?).map_err(value_error)
}

#[pyfunction]
fn distance(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<f64> {
    subspace_rip::distance(&subspace(&a)?, &subspace(&b)?).map_err(value_error)
}

/// Expected squared affinity after projecting to `n` dimensions.
#[pyfunction]
fn est_affinity_sq(d1: usize, d2: usize, n: usize, aff_sq: f64) -> PyResult<f64> {
    let p = PairParams::new(d1, d2, n, aff_sq).map_err(value_error)?;
    estimators::est_affinity_sq(&p).map_err(value_error)
}

/// Orthonormal bases `(x1, x2)` in `R^ambient` with the given affinity.
#[pyfunction]
#[pyo3(signature = (ambient, d1, d2, affinity, seed=42))]
fn make_pair(
    ambient: usize,
    d1: usize,
    d2: usize,
    affinity: f64,
    seed: u64,
) -> PyResult<(Rows, Rows)> {
    let pair = subspace_rip::make_pair(&PairSpec::uniform(ambient, d1, d2, affinity, seed)).map_err(value_error)?;
    Ok((to_rows(pair.x1.basis()), to_rows(pair.x2.basis())))
}

/// Runs a JSON experiment config and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (config, threads=None))]
fn run_experiment(py: Python<'_>, config: &str, threads: Option<usize>) -> PyResult<String> {
    let cfg: ExperimentConfig = serde_json::from_str(config).map_err(value_error)?;
    let opts = RunOptions {
        threads,
        keep_records: false,
    };
    let report = py.detach(|| run(&cfg, &opts)).map_err(value_error)?;
    serde_json::to_string(&report).map_err(value_error)
}

#[pymodule]
fn subspace_rip_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(principal_cosines, m)?)?;
    m.add_function(wrap_pyfunction!(affinity, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(est_affinity_sq, m)?)?;
    m.add_function(wrap_pyfunction!(make_pair, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
