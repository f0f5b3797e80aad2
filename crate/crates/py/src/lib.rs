//! Python bindings for the `pisano` crate.

#![allow(clippy::useless_conversion)]

use std::path::PathBuf;

use num_bigint::BigUint;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pisano::classify::Method;
use pisano::scan::ScanConfig;
use pisano::verify::{Suite, VerifyOptions};
use pisano::{
    classify as cls, fib as fibs, pisano as periods, scan as scans, verify as verif, wss as wsss,
    Error,
};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Domain(_) | Error::Overflow(_) | Error::Resource(_) => {
            PyValueError::new_err(err.to_string())
        }
        Error::Io { .. } | Error::Checkpoint { .. } => PyOSError::new_err(err.to_string()),
        Error::Anomaly(_) | Error::Internal(_) => PyRuntimeError::new_err(err.to_string()),
    }
}

fn json_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py
        .import_bound("json")?
        .call_method1("loads", (text,))?
        .unbind())
}

#[pyclass(name = "PrimePowerPeriod", module = "pisano_py", get_all, frozen)]
#[derive(Clone)]
struct PyPrimePowerPeriod {
    p: u64,
    e: u32,
    gamma_p: u64,
    epsilon: u32,
    gamma_pe: u64,
}

#[pyclass(name = "PisanoProfile", module = "pisano_py", get_all, frozen)]
struct PyPisanoProfile {
    m: u64,
    gamma: u64,
    alpha: u64,
    upsilon: u64,
    prime_powers: Vec<PyPrimePowerPeriod>,
}

#[pymethods]
impl PyPisanoProfile {
    fn __repr__(&self) -> String {
        format!(
            "PisanoProfile(m={}, gamma={}, alpha={}, upsilon={})",
            self.m, self.gamma, self.alpha, self.upsilon
        )
    }
}

impl From<periods::PisanoProfile> for PyPisanoProfile {
    fn from(p: periods::PisanoProfile) -> Self {
        PyPisanoProfile {
            m: p.m,
            gamma: p.gamma,
            alpha: p.alpha,
            upsilon: p.upsilon,
            prime_powers: p
                .prime_powers
                .into_iter()
                .map(|q| PyPrimePowerPeriod {
                    p: q.p,
                    e: q.e,
                    gamma_p: q.gamma_p,
                    epsilon: q.epsilon,
                    gamma_pe: q.gamma_pe,
                })
                .collect(),
        }
    }
}

#[pyclass(name = "PrimeEntry", module = "pisano_py", get_all, frozen)]
#[derive(Clone)]
struct PyPrimeEntry {
    p: u64,
    e: u32,
    gamma_p: u64,
    k: u32,
    good_prime: bool,
    upsilon_p: u64,
}

#[pyclass(name = "GoodnessReport", module = "pisano_py", get_all, frozen)]
struct PyGoodnessReport {
    m: u64,
    is_odd: bool,
    gamma: u64,
    prime_entries: Vec<PyPrimeEntry>,
    is_good: bool,
    upsilon_m: u64,
    method: String,
}

#[pymethods]
impl PyGoodnessReport {
    fn __repr__(&self) -> String {
        format!(
            "GoodnessReport(m={}, is_good={}, method={:?})",
            self.m, self.is_good, self.method
        )
    }
}

impl From<cls::GoodnessReport> for PyGoodnessReport {
    fn from(r: cls::GoodnessReport) -> Self {
        let method = match r.method {
            Method::Direct => "direct",
            Method::Fast => "fast",
            Method::Both => "both",
        };
        PyGoodnessReport {
            m: r.m,
            is_odd: r.is_odd,
            gamma: r.gamma,
            prime_entries: r
                .prime_entries
                .into_iter()
                .map(|e| PyPrimeEntry {
                    p: e.p,
                    e: e.e,
                    gamma_p: e.gamma_p,
                    k: e.k,
                    good_prime: e.good_prime,
                    upsilon_p: e.upsilon_p,
                })
                .collect(),
            is_good: r.is_good,
            upsilon_m: r.upsilon_m,
            method: method.to_owned(),
        }
    }
}

#[pyclass(name = "WssRecord", module = "pisano_py", get_all, frozen)]
#[derive(Clone)]
struct PyWssRecord {
    p: u64,
    legendre5: i8,
    index: u64,
    residue_fib_index_mod_p2: u64,
    residue_fib_gamma_mod_p2: u64,
    is_wss: bool,
    criteria_agree: bool,
}

#[pymethods]
impl PyWssRecord {
    fn __repr__(&self) -> String {
        format!("WssRecord(p={}, is_wss={})", self.p, self.is_wss)
    }
}

impl From<&wsss::WssRecord> for PyWssRecord {
    fn from(r: &wsss::WssRecord) -> Self {
        PyWssRecord {
            p: r.p,
            legendre5: r.legendre5,
            index: r.index,
            residue_fib_index_mod_p2: r.residue_fib_index_mod_p2,
            residue_fib_gamma_mod_p2: r.residue_fib_gamma_mod_p2,
            is_wss: r.is_wss,
            criteria_agree: r.criteria_agree,
        }
    }
}

#[pyclass(name = "SelfSquareRecord", module = "pisano_py", get_all, frozen)]
struct PySelfSquareRecord {
    m: u64,
    gamma: u64,
    residue_mod_m2: u64,
    divisible: bool,
}

impl From<wsss::SelfSquareRecord> for PySelfSquareRecord {
    fn from(r: wsss::SelfSquareRecord) -> Self {
        PySelfSquareRecord {
            m: r.m,
            gamma: r.gamma,
            residue_mod_m2: r.residue_mod_m2,
            divisible: r.divisible,
        }
    }
}

#[pyclass(name = "ScanCheckpoint", module = "pisano_py", get_all, frozen)]
struct PyScanCheckpoint {
    range_lo: u64,
    range_hi: u64,
    last_completed: Option<u64>,
    hits: Vec<PyWssRecord>,
    anomaly_count: u64,
    wall_time_seconds: f64,
    complete: bool,
    primes_tested: u64,
    resumed: bool,
}

#[pymethods]
impl PyScanCheckpoint {
    fn __repr__(&self) -> String {
        format!(
            "ScanCheckpoint(range=[{}, {}], last_completed={:?}, hits={}, complete={})",
            self.range_lo,
            self.range_hi,
            self.last_completed,
            self.hits.len(),
            self.complete
        )
    }
}

/// Exact `u_n` as a Python int.
#[pyfunction]
fn fib(n: u64) -> PyResult<BigUint> {
    fibs::fib_exact(n).map_err(to_py)
}

/// `u_n mod m`.
#[pyfunction]
fn fib_mod(n: u64, m: u64) -> PyResult<u64> {
    fibs::fib_mod(n, m).map_err(to_py)
}

/// `(u_{n-1}, u_n, u_{n+1}) mod m`, the entries of `P^n`.
#[pyfunction]
fn matrix_pow(n: u64, m: u64) -> PyResult<(u64, u64, u64)> {
    let p = fibs::matrix_pow_mod(n, m).map_err(to_py)?;
    Ok((p.u_prev, p.u_cur, p.u_next))
}

#[pyfunction]
#[pyo3(signature = (m, fast = true))]
fn pisano_period(py: Python<'_>, m: u64, fast: bool) -> PyResult<u64> {
    py.allow_threads(|| {
        if fast {
            periods::pisano_fast(m)
        } else {
            periods::pisano_direct(m)
        }
    })
    .map_err(to_py)
}

#[pyfunction]
fn profile(m: u64) -> PyResult<PyPisanoProfile> {
    periods::profile(m).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn factorize(n: u64) -> PyResult<Vec<(u64, u32)>> {
    pisano::arith::factorize(n)
        .map(|f| f.factors().to_vec())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (m, method = "both"))]
fn classify(py: Python<'_>, m: u64, method: &str) -> PyResult<PyGoodnessReport> {
    let method: Method = method.parse().map_err(to_py)?;
    py.allow_threads(|| cls::classify(m, method))
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn is_good(m: u64) -> PyResult<bool> {
    cls::is_good_direct(m).map_err(to_py)
}

#[pyfunction]
fn is_wss(p: u64) -> PyResult<PyWssRecord> {
    wsss::is_wss(p).map(|r| (&r).into()).map_err(to_py)
}

#[pyfunction]
fn self_square(m: u64) -> PyResult<PySelfSquareRecord> {
    wsss::self_square_test(m).map(Into::into).map_err(to_py)
}

/// All `m <= m_max` with `m^2 | u_{γ(m)}`.
#[pyfunction]
fn self_square_moduli(py: Python<'_>, m_max: u64) -> PyResult<Vec<u64>> {
    let records = py
        .allow_threads(|| wsss::enumerate_self_square(m_max))
        .map_err(to_py)?;
    Ok(records.into_iter().map(|r| r.m).collect())
}

#[pyfunction]
#[pyo3(signature = (lo, hi, checkpoint, workers = 1, results = None, block_size = scans::DEFAULT_BLOCK_SIZE, max_blocks = None))]
#[allow(clippy::too_many_arguments)]
fn wss_scan(
    py: Python<'_>,
    lo: u64,
    hi: u64,
    checkpoint: PathBuf,
    workers: usize,
    results: Option<PathBuf>,
    block_size: u64,
    max_blocks: Option<usize>,
) -> PyResult<PyScanCheckpoint> {
    let mut cfg = ScanConfig::new(lo, hi, workers, checkpoint);
    cfg.results_path = results;
    cfg.block_size = block_size;
    cfg.max_blocks = max_blocks;
    let out = py.allow_threads(|| scans::scan_wss(&cfg)).map_err(to_py)?;
    let cp = out.checkpoint;
    Ok(PyScanCheckpoint {
        range_lo: cp.range_lo,
        range_hi: cp.range_hi,
        last_completed: cp.last_completed,
        hits: cp.hits.iter().map(Into::into).collect(),
        anomaly_count: cp.anomaly_count,
        wall_time_seconds: cp.wall_time_seconds,
        complete: out.complete,
        primes_tested: out.primes_tested,
        resumed: out.resumed,
    })
}

/// Runs a property suite and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite = "all", max = 10_000, seed = 0, samples = 1000))]
fn verify(
    py: Python<'_>,
    suite: &str,
    max: u64,
    seed: u64,
    samples: usize,
) -> PyResult<Py<PyDict>> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let opts = VerifyOptions { max, seed, samples };
    let report = py.allow_threads(|| verif::run(suite, &opts));
    let obj = json_to_py(py, &report)?;
    Ok(obj.downcast_bound::<PyDict>(py)?.clone().unbind())
}

#[pymodule]
fn pisano_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPisanoProfile>()?;
    m.add_class::<PyPrimePowerPeriod>()?;
    m.add_class::<PyGoodnessReport>()?;
    m.add_class::<PyPrimeEntry>()?;
    m.add_class::<PyWssRecord>()?;
    m.add_class::<PySelfSquareRecord>()?;
    m.add_class::<PyScanCheckpoint>()?;
    m.add_function(wrap_pyfunction!(fib, m)?)?;
    m.add_function(wrap_pyfunction!(fib_mod, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_pow, m)?)?;
    m.add_function(wrap_pyfunction!(pisano_period, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(is_good, m)?)?;
    m.add_function(wrap_pyfunction!(is_wss, m)?)?;
    m.add_function(wrap_pyfunction!(self_square, m)?)?;
    m.add_function(wrap_pyfunction!(self_square_moduli, m)?)?;
    m.add_function(wrap_pyfunction!(wss_scan, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
