//! Python bindings for `rootratio`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use rootratio::boyd_lawton as bl;
use rootratio::mahler as mh;
use rootratio::torus;
use rootratio::uniroot;
use rootratio::{Error, Method, MultiPoly, QuadratureSpec, UniPoly};

create_exception!(rootratio, RootRatioError, PyException);
create_exception!(rootratio, ParseError, RootRatioError);
create_exception!(rootratio, NumericalError, RootRatioError);
create_exception!(rootratio, UnimodularRootsError, RootRatioError);

fn to_py_err(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::UnimodularRoots(c) => {
            UnimodularRootsError::new_err((msg, (c.inside, c.unimodular, c.outside)))
        }
        e if e.exit_code() == 2 => ParseError::new_err((msg, e.code())),
        e => NumericalError::new_err((msg, e.code())),
    }
}

fn uni(coeffs: Vec<Complex64>) -> PyResult<UniPoly> {
    UniPoly::new(coeffs).map_err(to_py_err)
}

fn spec(
    samples: usize,
    seed: u64,
    method: &str,
    nodes_per_dim: usize,
    band: f64,
    max_discard: f64,
) -> PyResult<QuadratureSpec> {
    let spec = QuadratureSpec {
        method: method.parse::<Method>().map_err(to_py_err)?,
        total_samples: samples,
        nodes_per_dim,
        seed,
        circle_band_delta: band,
        max_discard_fraction: max_discard,
    };
    spec.validate().map_err(to_py_err)?;
    Ok(spec)
}

/// Sparse polynomial in named variables.
#[pyclass(name = "Polynomial", frozen)]
struct PyPolynomial {
    inner: MultiPoly,
}

impl PyPolynomial {
    fn var(&self, name: &str) -> PyResult<usize> {
        self.inner
            .var_index(name)
            .ok_or_else(|| to_py_err(Error::UnknownVariable(name.to_string())))
    }
}

#[pymethods]
impl PyPolynomial {
    #[new]
    #[pyo3(signature = (source, variables=None))]
    fn new(source: &str, variables: Option<Vec<String>>) -> PyResult<Self> {
        let order: Option<Vec<&str>> = variables
            .as_ref()
            .map(|v| v.iter().map(String::as_str).collect());
        let inner = rootratio::parse_poly(source, order.as_deref()).map_err(to_py_err)?;
        Ok(PyPolynomial { inner })
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.var_names().to_vec()
    }

    fn num_terms(&self) -> usize {
        self.inner.num_terms()
    }

    /// `(exponents, coefficient)` pairs in canonical order.
    fn terms(&self) -> Vec<(Vec<u32>, Complex64)> {
        self.inner.terms().map(|(e, c)| (e.to_vec(), *c)).collect()
    }

    fn degree_in(&self, variable: &str) -> PyResult<u32> {
        self.inner.degree_in(self.var(variable)?).map_err(to_py_err)
    }

    fn partial_derivative(&self, variable: &str) -> PyResult<Self> {
        let inner = self
            .inner
            .partial_derivative(self.var(variable)?)
            .map_err(to_py_err)?;
        Ok(PyPolynomial { inner })
    }

    fn evaluate(&self, point: Vec<Complex64>) -> PyResult<Complex64> {
        if point.len() != self.inner.num_vars() {
            return Err(to_py_err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.inner.num_vars(),
                point.len()
            ))));
        }
        Ok(self.inner.evaluate(&point))
    }

    /// Ascending coefficients of `P(x, x^n2, ..., x^nk)`.
    fn substitute(&self, exponents: Vec<u64>) -> PyResult<Vec<Complex64>> {
        let u = self
            .inner
            .substitute_powers(&exponents)
            .map_err(to_py_err)?;
        Ok(u.coeffs().to_vec())
    }

    fn __add__(&self, other: &Self) -> Self {
        PyPolynomial {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyPolynomial {
            inner: &self.inner - &other.inner,
        }
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyPolynomial {
            inner: &self.inner * &other.inner,
        }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({:?})", self.inner.to_string())
    }
}

#[pyclass(name = "MeasureEstimate", frozen, get_all)]
struct PyEstimate {
    value: f64,
    std_error: f64,
    imag_residual: f64,
    discarded_fraction: f64,
    samples_used: usize,
    method: String,
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!(
            "MeasureEstimate(value={}, std_error={}, samples_used={}, method={:?})",
            self.value, self.std_error, self.samples_used, self.method
        )
    }
}

impl From<torus::MeasureEstimate> for PyEstimate {
    fn from(e: torus::MeasureEstimate) -> Self {
        PyEstimate {
            value: e.value,
            std_error: e.std_error,
            imag_residual: e.imag_residual,
            discarded_fraction: e.discarded_fraction,
            samples_used: e.samples_used,
            method: e.method_tag,
        }
    }
}

#[pyclass(name = "RootReport", frozen, get_all)]
struct PyRootReport {
    roots: Vec<Complex64>,
    inside: usize,
    unimodular: usize,
    outside: usize,
    degree: usize,
}

#[pymethods]
impl PyRootReport {
    fn counts(&self) -> (usize, usize, usize) {
        (self.inside, self.unimodular, self.outside)
    }

    fn __repr__(&self) -> String {
        format!(
            "RootReport(degree={}, inside={}, unimodular={}, outside={})",
            self.degree, self.inside, self.unimodular, self.outside
        )
    }
}

#[pyclass(name = "ConvergenceRow", frozen, get_all)]
struct PyRow {
    exponents: Vec<u64>,
    degree: usize,
    inside: usize,
    unimodular: usize,
    outside: usize,
    ratio_inside: f64,
    ratio_unimodular: f64,
    ratio_outside: f64,
}

#[pymethods]
impl PyRow {
    fn __repr__(&self) -> String {
        format!(
            "ConvergenceRow(exponents={:?}, degree={}, ratio_inside={})",
            self.exponents, self.degree, self.ratio_inside
        )
    }
}

impl From<bl::ConvergenceRow> for PyRow {
    fn from(r: bl::ConvergenceRow) -> Self {
        PyRow {
            exponents: r.exponents,
            degree: r.degree,
            inside: r.inside,
            unimodular: r.unimodular,
            outside: r.outside,
            ratio_inside: r.ratio_inside,
            ratio_unimodular: r.ratio_unimodular,
            ratio_outside: r.ratio_outside,
        }
    }
}

#[pyclass(name = "MahlerResult", frozen, get_all)]
struct PyMahler {
    log_value: f64,
    exp_value: f64,
    std_error: f64,
    samples_used: usize,
    method: String,
}

#[pymethods]
impl PyMahler {
    fn __repr__(&self) -> String {
        format!(
            "MahlerResult(log_value={}, std_error={}, method={:?})",
            self.log_value, self.std_error, self.method
        )
    }
}

impl From<mh::MahlerResult> for PyMahler {
    fn from(m: mh::MahlerResult) -> Self {
        PyMahler {
            log_value: m.log_value,
            exp_value: m.exp_value,
            std_error: m.std_error,
            samples_used: m.samples_used,
            method: m.method_tag,
        }
    }
}

/// Roots of the polynomial with ascending coefficients `coeffs`.
#[pyfunction]
fn find_roots(py: Python<'_>, coeffs: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let p = uni(coeffs)?;
    py.detach(|| uniroot::find_roots(&p)).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (coeffs, delta=uniroot::DEFAULT_DELTA))]
fn root_report(py: Python<'_>, coeffs: Vec<Complex64>, delta: f64) -> PyResult<PyRootReport> {
    let p = uni(coeffs)?;
    let r = py
        .detach(|| uniroot::root_report(&p, delta))
        .map_err(to_py_err)?;
    Ok(PyRootReport {
        inside: r.inside,
        unimodular: r.unimodular,
        outside: r.outside,
        degree: r.degree,
        roots: r.roots,
    })
}

/// Exact fraction of roots inside the unit disk.
#[pyfunction]
#[pyo3(signature = (coeffs, delta=uniroot::DEFAULT_DELTA))]
fn c_exact(py: Python<'_>, coeffs: Vec<Complex64>, delta: f64) -> PyResult<f64> {
    let p = uni(coeffs)?;
    py.detach(|| uniroot::c_exact(&p, delta))
        .map(|r| r.value())
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (coeffs, initial_nodes=uniroot::WINDING_INITIAL_NODES))]
fn winding_count(py: Python<'_>, coeffs: Vec<Complex64>, initial_nodes: usize) -> PyResult<usize> {
    let p = uni(coeffs)?;
    py.detach(|| uniroot::winding_count(&p, initial_nodes))
        .map(|w| w.rounded)
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (
    poly, variable, estimator="slice", samples=65536, seed=0,
    method="jittered-monte-carlo", nodes_per_dim=16, band=1e-7, max_discard=0.01
))]
#[allow(clippy::too_many_arguments)]
fn c_j(
    py: Python<'_>,
    poly: &PyPolynomial,
    variable: &str,
    estimator: &str,
    samples: usize,
    seed: u64,
    method: &str,
    nodes_per_dim: usize,
    band: f64,
    max_discard: f64,
) -> PyResult<PyEstimate> {
    let s = spec(samples, seed, method, nodes_per_dim, band, max_discard)?;
    let j = poly.var(variable)?;
    let p = &poly.inner;
    let est = match estimator {
        "slice" => py.detach(|| torus::c_j_slice(p, j, &s)),
        "direct" => py.detach(|| torus::c_j_direct(p, j, &s)),
        other => Err(Error::InvalidArgument(format!(
            "unknown estimator `{other}`"
        ))),
    };
    est.map(PyEstimate::from).map_err(to_py_err)
}

/// `c(P)` with respect to the last variable.
#[pyfunction]
#[pyo3(signature = (
    poly, samples=65536, seed=0, method="jittered-monte-carlo",
    nodes_per_dim=16, band=1e-7, max_discard=0.01
))]
#[allow(clippy::too_many_arguments)]
fn c_default(
    py: Python<'_>,
    poly: &PyPolynomial,
    samples: usize,
    seed: u64,
    method: &str,
    nodes_per_dim: usize,
    band: f64,
    max_discard: f64,
) -> PyResult<PyEstimate> {
    let s = spec(samples, seed, method, nodes_per_dim, band, max_discard)?;
    py.detach(|| torus::c_default(&poly.inner, &s))
        .map(PyEstimate::from)
        .map_err(to_py_err)
}

#[pyfunction]
fn trinomial_closed_form(a: f64) -> f64 {
    torus::trinomial_closed_form(a)
}

#[pyfunction]
fn mahler_univariate(py: Python<'_>, coeffs: Vec<Complex64>) -> PyResult<PyMahler> {
    let p = uni(coeffs)?;
    py.detach(|| mh::mahler_univariate(&p))
        .map(PyMahler::from)
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (
    poly, samples=65536, seed=0, method="jittered-monte-carlo",
    nodes_per_dim=16, max_discard=0.01
))]
fn mahler_torus(
    py: Python<'_>,
    poly: &PyPolynomial,
    samples: usize,
    seed: u64,
    method: &str,
    nodes_per_dim: usize,
    max_discard: f64,
) -> PyResult<PyMahler> {
    let s = spec(samples, seed, method, nodes_per_dim, 1e-7, max_discard)?;
    py.detach(|| mh::mahler_torus(&poly.inner, &s))
        .map(PyMahler::from)
        .map_err(to_py_err)
}

/// Root census of `P(x, x^n2, ..., x^nk)`.
#[pyfunction]
fn c_substituted(py: Python<'_>, poly: &PyPolynomial, exponents: Vec<u64>) -> PyResult<PyRow> {
    py.detach(|| bl::c_substituted(&poly.inner, &exponents))
        .map(PyRow::from)
        .map_err(to_py_err)
}

/// `(value, std_error)` of the sum of `c_j` over all but the first variable.
#[pyfunction]
#[pyo3(signature = (poly, samples=65536, seed=0, method="jittered-monte-carlo"))]
fn limit_prediction(
    py: Python<'_>,
    poly: &PyPolynomial,
    samples: usize,
    seed: u64,
    method: &str,
) -> PyResult<(f64, f64)> {
    let s = spec(samples, seed, method, 16, 1e-7, 0.01)?;
    py.detach(|| bl::limit_prediction(&poly.inner, &s))
        .map(|p| (p.value, p.std_error))
        .map_err(to_py_err)
}

/// `(rows, predicted_value, predicted_std_error)`.
#[pyfunction]
#[pyo3(signature = (poly, schedule, samples=65536, seed=0, method="jittered-monte-carlo"))]
fn convergence_table(
    py: Python<'_>,
    poly: &PyPolynomial,
    schedule: Vec<Vec<u64>>,
    samples: usize,
    seed: u64,
    method: &str,
) -> PyResult<(Vec<PyRow>, f64, f64)> {
    let s = spec(samples, seed, method, 16, 1e-7, 0.01)?;
    let t = py
        .detach(|| bl::convergence_table(&poly.inner, &schedule, &s))
        .map_err(to_py_err)?;
    let rows = t.rows.into_iter().map(PyRow::from).collect();
    Ok((rows, t.prediction.value, t.prediction.std_error))
}

#[pymodule]
#[pyo3(name = "rootratio")]
pub fn rootratio_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyRootReport>()?;
    m.add_class::<PyRow>()?;
    m.add_class::<PyMahler>()?;
    m.add("RootRatioError", py.get_type::<RootRatioError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add(
        "UnimodularRootsError",
        py.get_type::<UnimodularRootsError>(),
    )?;
    m.add_function(wrap_pyfunction!(find_roots, m)?)?;
    m.add_function(wrap_pyfunction!(root_report, m)?)?;
    m.add_function(wrap_pyfunction!(c_exact, m)?)?;
    m.add_function(wrap_pyfunction!(winding_count, m)?)?;
    m.add_function(wrap_pyfunction!(c_j, m)?)?;
    m.add_function(wrap_pyfunction!(c_default, m)?)?;
    m.add_function(wrap_pyfunction!(trinomial_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(mahler_univariate, m)?)?;
    m.add_function(wrap_pyfunction!(mahler_torus, m)?)?;
    m.add_function(wrap_pyfunction!(c_substituted, m)?)?;
    m.add_function(wrap_pyfunction!(limit_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    Ok(())
}
