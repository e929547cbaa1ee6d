//! Python bindings. Structured results come back as plain dicts and lists.

use charmoments::calibration::Calibration;
use charmoments::charsum::{all_char_sums_fft, all_char_sums_naive};
use charmoments::euler::{euler_expectation_main_term, euler_product_mc, EulerProductSpec};
use charmoments::modarith::{CharacterIndex, Parity, DEFAULT_MEMORY_CAP};
use charmoments::moments::{moment_from_table, rmf_moment_mc, shape_fit, Divisor};
use charmoments::proxy::{build_params, DeskProfile, ProfileSpec};
use charmoments::theta::{theta_all, theta_moment_from};
use charmoments::verify::{run_suite, Suite, SuiteConfig};
use charmoments::{rmf, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::TooLarge(_) => PyMemoryError::new_err(e.to_string()),
        Error::QuadratureFailure(_) | Error::Divergent(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialised<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn parse_divisor(s: &str) -> PyResult<Divisor> {
    match s {
        "phi" => Ok(Divisor::Phi),
        "q-2" | "q_minus_2" => Ok(Divisor::NonPrincipal),
        other => Err(PyValueError::new_err(format!("unknown divisor {other:?}"))),
    }
}

fn parse_parity(s: &str) -> PyResult<Parity> {
    match s {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(PyValueError::new_err(format!("unknown parity {other:?}"))),
    }
}

/// Prime modulus with its primitive root and discrete-log table.
#[pyclass(name = "PrimeModulus", module = "pycharmoments", frozen)]
struct PyPrimeModulus {
    inner: charmoments::PrimeModulus,
}

#[pymethods]
impl PyPrimeModulus {
    #[new]
    #[pyo3(signature = (q, memory_cap = DEFAULT_MEMORY_CAP))]
    fn new(q: u64, memory_cap: u64) -> PyResult<Self> {
        let inner = charmoments::PrimeModulus::with_memory_cap(q, memory_cap).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn generator(&self) -> u64 {
        self.inner.generator()
    }

    /// `chi_a(n)` where `chi_a(g^j) = e(a j / (q-1))`.
    fn char_value(&self, a: u64, n: u64) -> PyResult<Complex64> {
        if a >= self.inner.order() {
            return Err(PyValueError::new_err(format!("character index {a} out of range")));
        }
        Ok(self.inner.char_value(CharacterIndex(a), n))
    }

    /// `sum_{n <= x} chi_a(n)` for every `a`.
    #[pyo3(signature = (x, method = "fft"))]
    fn char_sums(&self, x: f64, method: &str) -> PyResult<Vec<Complex64>> {
        let table = match method {
            "fft" => all_char_sums_fft(&self.inner, x),
            "naive" => all_char_sums_naive(&self.inner, x),
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        }
        .map_err(py_err)?;
        Ok(table.values)
    }

    /// Average of `|S_chi(x)|^{2k}`.
    #[pyo3(signature = (x, k, exclude_principal = true, divisor = "phi"))]
    fn moment(&self, x: f64, k: f64, exclude_principal: bool, divisor: &str) -> PyResult<f64> {
        let d = parse_divisor(divisor)?;
        let table = all_char_sums_fft(&self.inner, x).map_err(py_err)?;
        Ok(moment_from_table(&table, k, exclude_principal, d).value)
    }

    /// `theta(1, chi_a)` for every `a`.
    fn theta_values(&self) -> PyResult<Vec<Complex64>> {
        Ok(theta_all(&self.inner)
            .map_err(py_err)?
            .into_iter()
            .map(|t| t.value)
            .collect())
    }

    #[pyo3(signature = (k, parity = "even"))]
    fn theta_moment(&self, k: f64, parity: &str) -> PyResult<f64> {
        let p = parse_parity(parity)?;
        let th = theta_all(&self.inner).map_err(py_err)?;
        Ok(theta_moment_from(&th, self.inner.q(), k, p).value)
    }

    fn __repr__(&self) -> String {
        format!(
            "PrimeModulus(q={}, generator={})",
            self.inner.q(),
            self.inner.generator()
        )
    }
}

/// One Steinhaus random multiplicative function realisation.
#[pyclass(name = "RmfSample", module = "pycharmoments", frozen)]
struct PyRmfSample {
    inner: rmf::RmfSample,
}

#[pymethods]
impl PyRmfSample {
    #[new]
    fn new(seed: u64, limit: u64) -> PyResult<Self> {
        Ok(Self {
            inner: rmf::RmfSample::new(seed, limit).map_err(py_err)?,
        })
    }

    fn f(&self, n: u64) -> PyResult<Complex64> {
        self.inner.f_at(n).map_err(py_err)
    }

    fn partial_sum(&self, x: f64) -> PyResult<Complex64> {
        self.inner.partial_sum(x).map_err(py_err)
    }
}

/// `E |sum_{n <= x} f(n)|^{2k}` exactly, as the count of `n_1..n_k = n_{k+1}..n_{2k}`.
#[pyfunction]
fn exact_moment_2k(x: f64, k: u32) -> PyResult<u128> {
    rmf::exact_moment_2k(x, k).map_err(py_err)
}

/// Monte-Carlo estimate with its standard error.
#[pyfunction]
#[pyo3(signature = (x, k, trials, seed = 0))]
fn rmf_moment<'py>(py: Python<'py>, x: f64, k: f64, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    serialised(py, &rmf_moment_mc(x, k, trials, seed).map_err(py_err)?)
}

#[allow(clippy::too_many_arguments)]
fn euler_spec(alpha: f64, beta: f64, sigma1: f64, sigma2: f64, t1: f64, t2: f64, z: f64, y: f64) -> EulerProductSpec {
    EulerProductSpec {
        alpha,
        beta,
        sigma1,
        sigma2,
        t1,
        t2,
        z,
        y,
    }
}

/// Main-term exponent for `E |F(s1)|^{2 alpha} |F(s2)|^{2 beta}` over primes in `[z, y]`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn euler_main_term<'py>(
    py: Python<'py>,
    alpha: f64,
    beta: f64,
    sigma1: f64,
    sigma2: f64,
    t1: f64,
    t2: f64,
    z: f64,
    y: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = euler_spec(alpha, beta, sigma1, sigma2, t1, t2, z, y);
    serialised(py, &euler_expectation_main_term(&spec).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (alpha, beta, sigma1, sigma2, t1, t2, z, y, trials, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn euler_mc<'py>(
    py: Python<'py>,
    alpha: f64,
    beta: f64,
    sigma1: f64,
    sigma2: f64,
    t1: f64,
    t2: f64,
    z: f64,
    y: f64,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = euler_spec(alpha, beta, sigma1, sigma2, t1, t2, z, y);
    serialised(py, &euler_product_mc(&spec, trials, seed).map_err(py_err)?)
}

/// Level chain for the proxy. `js` selects the desk profile; omit it for the paper profile.
#[pyfunction]
#[pyo3(signature = (log_x, k, c0, js = None, ratio = 20.0, q = None))]
fn proxy_params<'py>(
    py: Python<'py>,
    log_x: f64,
    k: f64,
    c0: f64,
    js: Option<Vec<u32>>,
    ratio: f64,
    q: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = match js {
        None => ProfileSpec::Paper,
        Some(js) => ProfileSpec::Desk(DeskProfile { js, ratio, modulus: q }),
    };
    serialised(py, &build_params(log_x, k, c0, &spec).map_err(py_err)?)
}

/// Regression of `log value` on `log log scale`.
#[pyfunction]
fn fit_shape<'py>(py: Python<'py>, points: Vec<(f64, f64)>) -> PyResult<Bound<'py, PyAny>> {
    serialised(py, &shape_fit(&points).map_err(py_err)?)
}

/// Runs a named check suite; returns one dict per check.
#[pyfunction]
#[pyo3(signature = (suite = "all", q = 101, x = 10.0, k = 2.0, seed = 7, trials = 4000))]
fn verify<'py>(
    py: Python<'py>,
    suite: &str,
    q: u64,
    x: f64,
    k: f64,
    seed: u64,
    trials: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let cfg = SuiteConfig {
        q,
        x,
        k,
        seed,
        trials,
        calibration: Calibration::default(),
    };
    let reports = py.detach(|| run_suite(suite, &cfg)).map_err(py_err)?;
    serialised(py, &reports)
}

#[pymodule]
fn pycharmoments(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPrimeModulus>()?;
    m.add_class::<PyRmfSample>()?;
    m.add_function(wrap_pyfunction!(exact_moment_2k, m)?)?;
    m.add_function(wrap_pyfunction!(rmf_moment, m)?)?;
    m.add_function(wrap_pyfunction!(euler_main_term, m)?)?;
    m.add_function(wrap_pyfunction!(euler_mc, m)?)?;
    m.add_function(wrap_pyfunction!(proxy_params, m)?)?;
    m.add_function(wrap_pyfunction!(fit_shape, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
