//! Python bindings: `import pychaff`.

use chaff::crosscheck::{validate_instance, ValidationOptions};
use chaff::{Deficit, Error, InfoCurve, Oracle, OracleLimits, Quantity, ValidityFlag};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pychaff, DeficitUnreachable, PyValueError, "No fragment reaches the requested information.");
create_exception!(pychaff, OracleLimitExceeded, PyRuntimeError, "Instance too large for the dense oracle.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::DeficitUnreachable { .. } => DeficitUnreachable::new_err(e.to_string()),
        Error::OracleLimit { .. } => OracleLimitExceeded::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn deficit(delta: f64) -> PyResult<Deficit> {
    Deficit::new(delta).map_err(to_py)
}

/// Good/bad spin environment.
#[pyclass(frozen, eq, skip_from_py_object, name = "EnvironmentSpec")]
#[derive(Clone, Copy, PartialEq)]
pub struct PyEnvironmentSpec(chaff::EnvironmentSpec);

#[pymethods]
impl PyEnvironmentSpec {
    #[new]
    #[pyo3(signature = (n_good, n_bad, gamma2_good, gamma2_bad, p0 = 0.5))]
    fn new(n_good: u64, n_bad: u64, gamma2_good: f64, gamma2_bad: f64, p0: f64) -> PyResult<Self> {
        chaff::EnvironmentSpec::new(n_good, n_bad, gamma2_good, gamma2_bad, p0)
            .map(Self)
            .map_err(to_py)
    }

    /// Good spins record perfectly, bad spins not at all.
    #[staticmethod]
    fn perfect(n_good: u64, n_bad: u64) -> PyResult<Self> {
        chaff::EnvironmentSpec::perfect(n_good, n_bad).map(Self).map_err(to_py)
    }

    #[getter]
    fn n_good(&self) -> u64 {
        self.0.n_good
    }
    #[getter]
    fn n_bad(&self) -> u64 {
        self.0.n_bad
    }
    #[getter]
    fn gamma2_good(&self) -> f64 {
        self.0.gamma2_good
    }
    #[getter]
    fn gamma2_bad(&self) -> f64 {
        self.0.gamma2_bad
    }
    #[getter]
    fn p0(&self) -> f64 {
        self.0.p0
    }
    #[getter]
    fn n_total(&self) -> u64 {
        self.0.n_total()
    }

    /// `H_S` in bits.
    fn pointer_entropy(&self) -> f64 {
        self.0.pointer_entropy().value()
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "EnvironmentSpec(n_good={}, n_bad={}, gamma2_good={}, gamma2_bad={}, p0={})",
            s.n_good, s.n_bad, s.gamma2_good, s.gamma2_bad, s.p0
        )
    }
}

#[pyclass(frozen, get_all, name = "RedundancyReport")]
pub struct PyRedundancyReport {
    f_delta: u64,
    f_delta_interpolated: f64,
    r_avg: f64,
    r_max_discrete: Option<f64>,
    r_max_continuous: f64,
    r_qcb: Option<f64>,
    r_qcb_expanded: Option<f64>,
    ratio_avg_over_max: Option<f64>,
    validity_flags: Vec<&'static str>,
}

fn flag_name(flag: ValidityFlag) -> &'static str {
    match flag {
        ValidityFlag::QcbValid => "qcb_valid",
        ValidityFlag::MaxFormulaValid => "max_formula_valid",
        ValidityFlag::DeficitUnreachable => "deficit_unreachable",
    }
}

#[pymethods]
impl PyRedundancyReport {
    fn __repr__(&self) -> String {
        format!(
            "RedundancyReport(f_delta={}, r_avg={}, r_max_discrete={:?}, r_qcb={:?})",
            self.f_delta, self.r_avg, self.r_max_discrete, self.r_qcb
        )
    }
}

/// Every redundancy estimate for `spec` at deficit `delta`.
#[pyfunction]
fn redundancy(spec: &PyEnvironmentSpec, delta: f64) -> PyResult<PyRedundancyReport> {
    let r = chaff::RedundancyReport::compute(&spec.0, deficit(delta)?).map_err(to_py)?;
    Ok(PyRedundancyReport {
        f_delta: r.f_delta,
        f_delta_interpolated: r.f_delta_interpolated,
        r_avg: r.r_avg,
        r_max_discrete: r.r_max_discrete,
        r_max_continuous: r.r_max_continuous,
        r_qcb: r.r_qcb,
        r_qcb_expanded: r.r_qcb_expanded,
        ratio_avg_over_max: r.ratio_avg_over_max,
        validity_flags: r.validity_flags.into_iter().map(flag_name).collect(),
    })
}

/// Exact fragment-averaged Holevo information in bits.
#[pyfunction]
fn avg_holevo(spec: &PyEnvironmentSpec, fragment_size: u64) -> PyResult<f64> {
    chaff::avg_holevo_exact(&spec.0, fragment_size).map(|b| b.value()).map_err(to_py)
}

/// `(size, interpolated)` of the smallest fragment holding `(1 − δ) H_S`.
#[pyfunction]
fn fragment_size(spec: &PyEnvironmentSpec, delta: f64) -> PyResult<(u64, f64)> {
    let f = chaff::find_fragment_size(&spec.0, deficit(delta)?).map_err(to_py)?;
    Ok((f.size, f.interpolated))
}

#[pyfunction]
fn p_all_bad(spec: &PyEnvironmentSpec, fragment_size: u64) -> PyResult<f64> {
    chaff::p_all_bad(&spec.0, fragment_size).map_err(to_py)
}

/// `(estimate, stderr)` from `samples` random fragments.
#[pyfunction]
#[pyo3(signature = (spec, fragment_size, samples = 10_000, seed = 20_100_401))]
fn mc_avg_holevo(spec: &PyEnvironmentSpec, fragment_size: u64, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let m = chaff::mc_avg_holevo(&spec.0, fragment_size, samples, seed).map_err(to_py)?;
    Ok((m.estimate.value(), m.stderr))
}

/// `[(fragment_size, bits, stderr or None)]` for `fmin..=fmax`.
///
/// `method` is `exact`, `monte-carlo` or `qcb-asymptotic`.
#[pyfunction]
#[pyo3(signature = (spec, method = "exact", fmin = 0, fmax = None, samples = 10_000, seed = 20_100_401))]
fn curve(
    py: Python<'_>,
    spec: &PyEnvironmentSpec,
    method: &str,
    fmin: u64,
    fmax: Option<u64>,
    samples: u64,
    seed: u64,
) -> PyResult<Vec<(u64, f64, Option<f64>)>> {
    let s = spec.0;
    let sizes = fmin..=fmax.unwrap_or(s.n_total());
    let c = py
        .detach(|| match method {
            "exact" => Some(InfoCurve::exact(&s, sizes)),
            "monte-carlo" => Some(InfoCurve::monte_carlo(&s, sizes, samples, seed)),
            "qcb-asymptotic" => Some(InfoCurve::qcb(&s, sizes)),
            _ => None,
        })
        .ok_or_else(|| PyValueError::new_err(format!("unknown method {method:?}")))?
        .map_err(to_py)?;
    Ok(c.entries
        .into_iter()
        .map(|p| (p.fragment_size, p.avg_info.value(), p.stderr))
        .collect())
}

/// Typical quantum Chernoff exponent `ξ̄` per spin.
#[pyfunction]
fn typical_chernoff(spec: &PyEnvironmentSpec) -> f64 {
    chaff::typical_chernoff(&spec.0).value()
}

/// `(1 − g) / ln(1/g)` for `g = gamma2_good`.
#[pyfunction]
fn definition_ratio(gamma2_good: f64, delta: f64) -> PyResult<f64> {
    chaff::definition_ratio(gamma2_good, deficit(delta)?)
        .map(|r| r.value)
        .map_err(to_py)
}

#[pyfunction]
fn min_definition_ratio(delta: f64) -> PyResult<f64> {
    Ok(chaff::min_definition_ratio(deficit(delta)?))
}

/// Fragment average from the dense-state oracle; `quantity` is `holevo`
/// or `mutual_information`.
#[pyfunction]
#[pyo3(signature = (spec, fragment_size, quantity = "holevo"))]
fn oracle_average(py: Python<'_>, spec: &PyEnvironmentSpec, fragment_size: usize, quantity: &str) -> PyResult<f64> {
    let quantity = match quantity {
        "holevo" => Quantity::Holevo,
        "mutual_information" => Quantity::MutualInformation,
        other => return Err(PyValueError::new_err(format!("unknown quantity {other:?}"))),
    };
    let s = spec.0;
    py.detach(|| {
        let oracle = Oracle::new(OracleLimits::from_env());
        let state = oracle.build_from_spec(&s)?;
        oracle.all_fragment_average(&state, fragment_size, quantity)
    })
    .map(|b| b.value())
    .map_err(to_py)
}

/// Runs every closed-form-against-oracle check; returns
/// `(passed, first_failure, [(name, max_deviation, tolerance, passed)])`.
#[pyfunction]
#[pyo3(signature = (spec, delta = 0.1))]
#[allow(clippy::type_complexity)]
fn validate(
    py: Python<'_>,
    spec: &PyEnvironmentSpec,
    delta: f64,
) -> PyResult<(bool, Option<String>, Vec<(String, f64, f64, bool)>)> {
    let d = deficit(delta)?;
    let s = spec.0;
    let summary = py
        .detach(|| {
            let oracle = Oracle::new(OracleLimits::from_env());
            validate_instance(&s, d, &oracle, ValidationOptions::default())
        })
        .map_err(to_py)?;
    let checks = summary
        .checks
        .into_iter()
        .map(|c| (c.name, c.max_deviation, c.tolerance, c.passed))
        .collect();
    Ok((summary.passed, summary.first_failure, checks))
}

#[pymodule]
fn pychaff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnvironmentSpec>()?;
    m.add_class::<PyRedundancyReport>()?;
    m.add("DeficitUnreachable", m.py().get_type::<DeficitUnreachable>())?;
    m.add("OracleLimitExceeded", m.py().get_type::<OracleLimitExceeded>())?;
    m.add_function(wrap_pyfunction!(redundancy, m)?)?;
    m.add_function(wrap_pyfunction!(avg_holevo, m)?)?;
    m.add_function(wrap_pyfunction!(fragment_size, m)?)?;
    m.add_function(wrap_pyfunction!(p_all_bad, m)?)?;
    m.add_function(wrap_pyfunction!(mc_avg_holevo, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(typical_chernoff, m)?)?;
    m.add_function(wrap_pyfunction!(definition_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(min_definition_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_average, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
