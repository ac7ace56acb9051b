//! Python bindings. Exact values come back as `fractions.Fraction`, float
//! values as `complex`, and verification reports as plain dicts.

use preduals_core::config::{load_spec, parse_spec};
use preduals_core::power::{named_element, power_norm_table};
use preduals_core::semigroup::{embed_sequence, limit_predict, theta_homomorphism_check, LimitParams, ProjectionSpec};
use preduals_core::sparse::{additively_sparse_check, SparseParams, SparseSet};
use preduals_core::szlenk::{shrink_radius, shrink_witness_check, ShrinkParams, WitnessFamily};
use preduals_core::xzero::{extend as extend_seq, verify_intertwine, verify_identities, x0_eval};
use preduals_core::{parse_complex, parse_real, Error, FinSeq, LambdaParam, Report, Scalar, ToReport, Window};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyComplex;

create_exception!(preduals, PredualsError, PyException);

fn err(e: Error) -> PyErr {
    PredualsError::new_err(e.to_string())
}

fn scalar_from_py(v: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    // ints, bools and Fractions all carry a denominator and print as p or p/q.
    if v.hasattr("denominator")? {
        return parse_real(&v.str()?.to_cow()?).map_err(err);
    }
    if let Ok(s) = v.extract::<String>() {
        return parse_complex(&s).map_err(err);
    }
    if let Ok(x) = v.extract::<f64>() {
        return Ok(Scalar::real(x));
    }
    let re: f64 = v.getattr("real")?.extract()?;
    let im: f64 = v.getattr("imag")?.extract()?;
    Ok(Scalar::complex(re, im))
}

fn scalar_to_py<'py>(py: Python<'py>, s: &Scalar) -> PyResult<Bound<'py, PyAny>> {
    match s {
        Scalar::Exact(q) => py.import("fractions")?.getattr("Fraction")?.call1((q.to_string(),)),
        Scalar::Float(z) => Ok(PyComplex::from_doubles(py, z.re, z.im).into_any()),
    }
}

fn report_to_py<'py>(py: Python<'py>, r: &Report) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (r.to_json_line(),))
}

/// A spectral parameter with `|lambda| > 1`.
#[pyclass(name = "Lambda", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLambda {
    inner: LambdaParam,
}

#[pymethods]
impl PyLambda {
    /// Accepts `RE[,IM]` text or a Python number.
    #[new]
    fn new(value: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyLambda {
            inner: LambdaParam::new(scalar_from_py(value)?).map_err(err)?,
        })
    }

    #[getter]
    fn modulus(&self) -> f64 {
        self.inner.modulus()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn value<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        scalar_to_py(py, self.inner.value())
    }

    fn __repr__(&self) -> String {
        format!("Lambda({})", self.inner.value())
    }
}

/// A finitely supported sequence on the integers.
#[pyclass(name = "Seq", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
struct PySeq {
    inner: FinSeq,
}

#[pymethods]
impl PySeq {
    /// Builds from a mapping `{index: value}`.
    #[new]
    #[pyo3(signature = (entries=None))]
    fn new(entries: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let mut out = Vec::new();
        if let Some(entries) = entries {
            for item in entries.call_method0("items")?.try_iter()? {
                let (n, v): (i64, Bound<'_, PyAny>) = item?.extract()?;
                out.push((n, scalar_from_py(&v)?));
            }
        }
        Ok(PySeq {
            inner: FinSeq::from_entries(out).map_err(err)?,
        })
    }

    #[staticmethod]
    fn delta(n: i64) -> Self {
        PySeq { inner: FinSeq::delta(n) }
    }

    /// Named elements: newman, binomial, delta1, scalar, double.
    #[staticmethod]
    #[pyo3(signature = (name, lam=None))]
    fn named(name: &str, lam: Option<&PyLambda>) -> PyResult<Self> {
        Ok(PySeq {
            inner: named_element(name, lam.map(|l| &l.inner)).map_err(err)?,
        })
    }

    fn entries<'py>(&self, py: Python<'py>) -> PyResult<Vec<(i64, Bound<'py, PyAny>)>> {
        self.inner.iter().map(|(n, v)| Ok((n, scalar_to_py(py, v)?))).collect()
    }

    fn __getitem__<'py>(&self, py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
        scalar_to_py(py, &self.inner.get(n))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __add__(&self, other: &PySeq) -> PySeq {
        PySeq {
            inner: self.inner.add(&other.inner),
        }
    }

    fn __sub__(&self, other: &PySeq) -> PySeq {
        PySeq {
            inner: self.inner.sub(&other.inner),
        }
    }

    /// Convolution.
    fn __mul__(&self, other: &PySeq) -> PyResult<PySeq> {
        Ok(PySeq {
            inner: self.inner.convolve(&other.inner).map_err(err)?,
        })
    }

    fn __pow__(&self, m: u32, _modulo: Option<u32>) -> PyResult<PySeq> {
        Ok(PySeq {
            inner: self.inner.power(m).map_err(err)?,
        })
    }

    fn shift(&self, m: i64) -> PyResult<PySeq> {
        Ok(PySeq {
            inner: self.inner.shift(m).map_err(err)?,
        })
    }

    fn involution(&self) -> PySeq {
        PySeq {
            inner: self.inner.involution(),
        }
    }

    fn scale(&self, c: &Bound<'_, PyAny>) -> PyResult<PySeq> {
        Ok(PySeq {
            inner: self.inner.scale(&scalar_from_py(c)?),
        })
    }

    fn l1_norm(&self) -> f64 {
        self.inner.l1_norm()
    }

    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn __repr__(&self) -> String {
        format!("Seq({})", self.inner)
    }
}

/// A projection configuration: generator images and their sparse family.
#[pyclass(name = "Spec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpec {
    inner: ProjectionSpec,
}

#[pymethods]
impl PySpec {
    /// Loads a TOML file; `"default"` selects the built-in configuration.
    #[staticmethod]
    #[pyo3(signature = (path="default"))]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PySpec {
            inner: load_spec(path).map_err(err)?,
        })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySpec {
            inner: parse_spec(text).map_err(err)?,
        })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn images(&self) -> Vec<PySeq> {
        self.inner.images.iter().map(|a| PySeq { inner: a.clone() }).collect()
    }
}

#[pyfunction]
fn x0<'py>(py: Python<'py>, lam: &PyLambda, n: i64) -> PyResult<Bound<'py, PyAny>> {
    scalar_to_py(py, &x0_eval(&lam.inner, n))
}

/// Operator identity and intertwining reports on `[-window, window]`.
#[pyfunction]
#[pyo3(signature = (lam, window=4096, seed=0))]
fn verify_xzero<'py>(py: Python<'py>, lam: &PyLambda, window: i64, seed: u64) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let w = Window::radius(window).map_err(err)?;
    let reports = py
        .detach(|| -> preduals_core::Result<Vec<Report>> {
            Ok(vec![
                verify_identities(&lam.inner, w, (window / 2 + 1) as u32)?.to_report(),
                verify_intertwine(&lam.inner, w, 16, seed)?.to_report(),
            ])
        })
        .map_err(err)?;
    reports.iter().map(|r| report_to_py(py, r)).collect()
}

/// The extension of `y` evaluated on `[lo, hi]` and its certificate report.
#[pyfunction]
#[pyo3(signature = (y, lam, lo=-1024, hi=1024))]
fn extend<'py>(
    py: Python<'py>,
    y: &PySeq,
    lam: &PyLambda,
    lo: i64,
    hi: i64,
) -> PyResult<(Vec<Bound<'py, PyAny>>, Bound<'py, PyAny>)> {
    let w = Window::new(lo, hi).map_err(err)?;
    let ext = extend_seq(&y.inner, &lam.inner).map_err(err)?;
    let cert = ext.certificate(w).map_err(err)?;
    let values = w.indices().map(|n| scalar_to_py(py, &ext.at(n))).collect::<PyResult<Vec<_>>>()?;
    let cert = serde_json::to_string(&cert).map_err(|e| PredualsError::new_err(e.to_string()))?;
    let cert = py.import("json")?.call_method1("loads", (cert,))?;
    Ok((values, cert))
}

/// Rows `(m, l1, sup)` for the powers `a^1..a^max_m`.
#[pyfunction]
fn power_table(py: Python<'_>, a: &PySeq, max_m: u32) -> PyResult<Vec<(u32, f64, f64)>> {
    let t = py.detach(|| power_norm_table(&a.inner, max_m)).map_err(err)?;
    Ok(t.rows.iter().map(|r| (r.m, r.l1, r.sup)).collect())
}

/// Members of a set such as `powers:2` or `factorials` up to `bound`.
#[pyfunction]
fn sparse_members(set: &str, bound: u64) -> PyResult<Vec<i64>> {
    Ok(SparseSet::parse(set).map_err(err)?.enumerate(bound))
}

#[pyfunction]
#[pyo3(signature = (set, t=100, r=3, s=3, bound=65536))]
fn sparse_check<'py>(py: Python<'py>, set: &str, t: i64, r: usize, s: usize, bound: u64) -> PyResult<Bound<'py, PyAny>> {
    let set = SparseSet::parse(set).map_err(err)?;
    let rep = py
        .detach(|| additively_sparse_check(&set, &SparseParams::new(t, r, s, bound)))
        .map_err(err)?;
    report_to_py(py, &rep.to_report())
}

#[pyfunction]
#[pyo3(signature = (spec, trials=100, seed=0))]
fn theta_check<'py>(py: Python<'py>, spec: &PySpec, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let rep = py
        .detach(|| theta_homomorphism_check(&spec.inner, trials, seed))
        .map_err(err)?;
    report_to_py(py, &rep.to_report())
}

/// Limit of the embedded integer sequence `values`, as a report.
#[pyfunction]
fn limit<'py>(py: Python<'py>, values: Vec<i64>, spec: &PySpec) -> PyResult<Bound<'py, PyAny>> {
    let seq = embed_sequence(&values, spec.inner.k());
    let p = py
        .detach(|| limit_predict(&seq, &spec.inner, &LimitParams::default()))
        .map_err(err)?;
    report_to_py(py, &p.to_report())
}

#[pyfunction]
#[pyo3(signature = (lam, eps, r=1.0))]
fn shrink(lam: &PyLambda, eps: f64, r: f64) -> PyResult<f64> {
    Ok(shrink_radius(&ShrinkParams::new(lam.inner.clone(), eps, r).map_err(err)?))
}

/// Shrink-witness report for the canonical dyadic family.
#[pyfunction]
#[pyo3(signature = (lam, eps, n_max=60))]
fn shrink_witness<'py>(py: Python<'py>, lam: &PyLambda, eps: f64, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
    let params = ShrinkParams::new(lam.inner.clone(), eps, 1.0).map_err(err)?;
    let fam = WitnessFamily::canonical(&lam.inner, n_max).map_err(err)?;
    let chain = shrink_witness_check(&fam, &params).map_err(err)?;
    report_to_py(py, &chain.to_report())
}

#[pymodule]
fn preduals(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PredualsError", m.py().get_type::<PredualsError>())?;
    m.add_class::<PyLambda>()?;
    m.add_class::<PySeq>()?;
    m.add_class::<PySpec>()?;
    m.add_function(wrap_pyfunction!(x0, m)?)?;
    m.add_function(wrap_pyfunction!(verify_xzero, m)?)?;
    m.add_function(wrap_pyfunction!(extend, m)?)?;
    m.add_function(wrap_pyfunction!(power_table, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_members, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_check, m)?)?;
    m.add_function(wrap_pyfunction!(theta_check, m)?)?;
    m.add_function(wrap_pyfunction!(limit, m)?)?;
    m.add_function(wrap_pyfunction!(shrink, m)?)?;
    m.add_function(wrap_pyfunction!(shrink_witness, m)?)?;
    Ok(())
}
