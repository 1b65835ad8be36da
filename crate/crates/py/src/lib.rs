//! Python bindings for `ptcircle`.
//!
//! Reports cross the boundary as plain dicts and lists (through the JSON
//! serialization of the core types); potentials are exposed as a class.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use ptcircle::format::{read_spectrum_json, spectrum_json};
use ptcircle::roots::{find_roots as core_find_roots, scan_secular, ScanConfig};
use ptcircle::secular::{
    monodromy, secular_explicit as core_explicit, ExplicitSecular, SecularFunction, SpectralPoint,
};
use ptcircle::solve::{backend_agreement as core_agreement, free_limit_check, solve, SolveOptions};
use ptcircle::spectrum::DEFAULT_QUASI_TOL;
use ptcircle::{
    Backend, CirclePotential, Error, LogScaledValue, Matching, MonodromySecular, Segment,
};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::NonReal { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::AtPoint { ref source, .. } if matches!(**source, Error::NonReal { .. }) => {
            PyArithmeticError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_matching(name: Option<&str>) -> PyResult<Option<Matching>> {
    name.map(str::parse).transpose().map_err(to_py_err)
}

fn parse_backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(to_py_err)
}

/// Python object from any serializable value, via `json.loads`.
fn to_python<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| to_py_err(e.into()))?;
    json_loads(py, &text)
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn pair(v: LogScaledValue) -> (i8, f64) {
    (v.sign, v.logmag)
}

fn scan_range(
    z: f64,
    levels: usize,
    t_min: Option<f64>,
    t_max: Option<f64>,
    samples: Option<usize>,
) -> PyResult<ScanConfig> {
    let mut cfg = ScanConfig::for_levels(z, levels.max(1));
    cfg.t_min = t_min.unwrap_or(cfg.t_min);
    cfg.t_max = t_max.unwrap_or(cfg.t_max);
    cfg.initial_samples = samples.unwrap_or(cfg.initial_samples);
    cfg.validate().map_err(to_py_err)?;
    Ok(cfg)
}

/// Piecewise-constant imaginary potential on the circle `[-2, 2)`.
#[pyclass(name = "CirclePotential", module = "ptcircle_py", frozen)]
struct PyCirclePotential {
    inner: CirclePotential,
}

impl PyCirclePotential {
    fn secular_fn(&self, matching: Option<&str>) -> PyResult<MonodromySecular> {
        let f = MonodromySecular::new(self.inner.clone());
        Ok(match parse_matching(matching)? {
            Some(m) => f.with_matching(m),
            None => f,
        })
    }
}

#[pymethods]
impl PyCirclePotential {
    /// `4M` alternating `±iZ` segments of width `1/M`, starting with `+iZ`.
    #[staticmethod]
    fn square_well(m: usize, z: f64) -> PyResult<Self> {
        let inner = CirclePotential::square_well(m, z).map_err(to_py_err)?;
        Ok(PyCirclePotential { inner })
    }

    /// From `(width, im)` pairs ordered from `s = -2`.
    #[staticmethod]
    fn from_segments(segments: Vec<(f64, f64)>) -> PyResult<Self> {
        let segments = segments
            .into_iter()
            .map(|(width, im)| Segment { width, im })
            .collect();
        let inner = CirclePotential::from_segments(segments).map_err(to_py_err)?;
        Ok(PyCirclePotential { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| to_py_err(e.into()))?;
        Ok(PyCirclePotential { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| to_py_err(e.into()))
    }

    #[getter]
    fn coupling(&self) -> f64 {
        self.inner.coupling()
    }

    #[getter]
    fn segments(&self) -> Vec<(f64, f64)> {
        self.inner
            .segments()
            .iter()
            .map(|s| (s.width, s.im))
            .collect()
    }

    fn boundaries(&self) -> Vec<f64> {
        self.inner.boundaries()
    }

    fn value_at(&self, s: f64) -> Complex64 {
        self.inner.value_at(s)
    }

    fn rotate(&self, k: isize) -> Self {
        PyCirclePotential {
            inner: self.inner.rotate_segments(k),
        }
    }

    fn reversed_conjugate(&self) -> Self {
        PyCirclePotential {
            inner: self.inner.reversed_conjugate(),
        }
    }

    #[pyo3(signature = (samples = 1024))]
    fn is_pt_symmetric(&self, samples: usize) -> bool {
        self.inner.is_pt_symmetric(samples)
    }

    /// Trace of the monodromy at `t`.
    fn monodromy_trace(&self, t: f64) -> PyResult<Complex64> {
        let point = SpectralPoint::new(self.inner.coupling(), t).map_err(to_py_err)?;
        Ok(monodromy(&self.inner, &point).map_err(to_py_err)?.trace())
    }

    /// Secular value at `t` as `(sign, log|F|)`.
    #[pyo3(signature = (t, matching = None))]
    fn secular(&self, t: f64, matching: Option<&str>) -> PyResult<(i8, f64)> {
        Ok(pair(self.secular_fn(matching)?.eval(t).map_err(to_py_err)?))
    }

    /// Root records in descending `t`.
    #[pyo3(signature = (levels, matching = None, t_min = None, t_max = None, samples = None))]
    fn find_roots<'py>(
        &self,
        py: Python<'py>,
        levels: usize,
        matching: Option<&str>,
        t_min: Option<f64>,
        t_max: Option<f64>,
        samples: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = self.secular_fn(matching)?;
        let cfg = scan_range(self.inner.coupling(), levels, t_min, t_max, samples)?;
        let search = core_find_roots(&f, levels, Some(cfg)).map_err(to_py_err)?;
        to_python(py, &search)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "CirclePotential(coupling={}, segments={})",
            self.inner.coupling(),
            self.inner.len()
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Leading large-`alpha` shape `e^{-2Mα} (-cos πMs + i sin πMs)` of the
/// smooth angular potential the step family approximates.
#[pyfunction]
fn asymptotic_pt_imag(m: usize, alpha: f64, s: f64) -> Complex64 {
    ptcircle::asymptotic_pt_imag(m, alpha, s)
}

/// Explicit 8×8 matching determinant of the double well as `(sign, log|det|)`.
#[pyfunction]
#[pyo3(signature = (z, t, reality_tol = ptcircle::secular::DEFAULT_REALITY_TOL))]
fn secular_explicit(z: f64, t: f64, reality_tol: f64) -> PyResult<(i8, f64)> {
    Ok(pair(core_explicit(z, t, reality_tol).map_err(to_py_err)?))
}

/// `(t, sign, log|F|)` on a uniform grid.
#[pyfunction]
#[pyo3(signature = (z, t_min, t_max, samples = 2048, m = 1, backend = "monodromy", matching = None))]
fn scan(
    z: f64,
    t_min: f64,
    t_max: f64,
    samples: usize,
    m: usize,
    backend: &str,
    matching: Option<&str>,
) -> PyResult<Vec<(f64, i8, f64)>> {
    let cfg = scan_range(z, 1, Some(t_min), Some(t_max), Some(samples))?;
    let samples = match parse_backend(backend)? {
        Backend::Monodromy => {
            let pot = PyCirclePotential::square_well(m, z)?;
            scan_secular(&pot.secular_fn(matching)?, &cfg)
        }
        Backend::Explicit if m == 1 => {
            scan_secular(&ExplicitSecular::new(z).map_err(to_py_err)?, &cfg)
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "scan takes a single backend with M=1, got {other} with M={m}"
            )))
        }
    }
    .map_err(to_py_err)?;
    Ok(samples
        .into_iter()
        .map(|s| (s.t, s.sign, s.logmag))
        .collect())
}

/// Lowest `levels` levels as a dict with the difference tables, plus
/// `warning` when fewer levels were found.
#[pyfunction]
#[pyo3(signature = (z, m = 1, levels = 18, backend = "monodromy", matching = None, quasi_tol = DEFAULT_QUASI_TOL))]
fn spectrum<'py>(
    py: Python<'py>,
    z: f64,
    m: usize,
    levels: usize,
    backend: &str,
    matching: Option<&str>,
    quasi_tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut opts = SolveOptions::new(z, m, levels).backend(parse_backend(backend)?);
    opts.matching = parse_matching(matching)?;
    opts.quasi_tol = quasi_tol;
    let run = py.detach(|| solve(&opts)).map_err(to_py_err)?;
    let report = json_loads(py, &spectrum_json(&run.report).map_err(to_py_err)?)?;
    report.set_item("warning", run.warning.map(|w| w.to_string()))?;
    Ok(report)
}

/// Recomputes the tables of a spectrum serialized as JSON.
#[pyfunction]
#[pyo3(signature = (report_json, quasi_tol = DEFAULT_QUASI_TOL))]
fn analyze<'py>(py: Python<'py>, report_json: &str, quasi_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let report = read_spectrum_json(report_json).map_err(to_py_err)?;
    to_python(py, &report.reanalyzed(quasi_tol))
}

/// Double-well roots of the explicit determinant and the monodromy on one interval.
#[pyfunction]
#[pyo3(signature = (z, t_lo = 0.03, t_hi = 1.0, matching = "origin-twist"))]
fn backend_agreement<'py>(
    py: Python<'py>,
    z: f64,
    t_lo: f64,
    t_hi: f64,
    matching: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let matching = parse_matching(Some(matching))?.unwrap_or(Matching::OriginTwist);
    let a = py
        .detach(|| core_agreement(z, t_lo, t_hi, matching))
        .map_err(to_py_err)?;
    to_python(py, &a)
}

/// Weak-coupling levels against the free spectrum `(πm/2)²`.
#[pyfunction]
#[pyo3(signature = (z, count = 5, tol = 1e-3))]
fn free_limit<'py>(py: Python<'py>, z: f64, count: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let check = py
        .detach(|| free_limit_check(z, count, None, tol))
        .map_err(to_py_err)?;
    let out = to_python(py, &check)?;
    out.set_item("passed", check.passed())?;
    Ok(out)
}

#[pymodule]
fn ptcircle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCirclePotential>()?;
    m.add_function(wrap_pyfunction!(asymptotic_pt_imag, m)?)?;
    m.add_function(wrap_pyfunction!(secular_explicit, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(backend_agreement, m)?)?;
    m.add_function(wrap_pyfunction!(free_limit, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_range_overrides() {
        let cfg = scan_range(1.0, 18, Some(0.1), None, Some(64)).unwrap();
        assert_eq!(cfg.t_min, 0.1);
        assert_eq!(cfg.t_max, 5.0);
        assert_eq!(cfg.initial_samples, 64);
    }

    #[test]
    fn potential_wrapper() {
        let p = PyCirclePotential::square_well(2, 1.0).unwrap();
        assert_eq!(p.__len__(), 8);
        assert_eq!(p.rotate(8).inner, p.inner);
        let back = PyCirclePotential::from_json(&p.to_json().unwrap()).unwrap();
        assert!(back.__eq__(&p));
        let (sign, _) = PyCirclePotential::square_well(1, 1.0)
            .unwrap()
            .secular(0.9, None)
            .unwrap();
        assert_eq!(sign, -1);
    }
}
