//! Python bindings for `syssamp`.
//!
//! Structured results (coefficient sets, MSE reports, tables, simulation
//! reports) come back as plain dictionaries with the same keys as the JSON
//! documents written by the command-line tool.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use syssamp::design::Mechanism;
use syssamp::estimate::{EstimatorSpec, Family};
use syssamp::mc::{self, SimulationConfig, StartSelection, SynthesisParams};
use syssamp::moments::{self, MomentsFile, PopulationMoments};
use syssamp::theory::{self, DiscrepancyTolerances, ReferenceTable, Setting, ShrinkagePolicy};

fn value_error(e: syssamp::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

trait OrValueError<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrValueError<T> for syssamp::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(value_error)
    }
}

fn to_python<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_python<T: DeserializeOwned>(py: Python<'_>, value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = py
        .import("json")?
        .call_method1("dumps", (value,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn families(selection: &str) -> PyResult<Vec<Family>> {
    Family::parse_list(selection).py()
}

fn setting(m: &Moments, k_rate: f64, l_factor: f64) -> PyResult<Setting> {
    Setting::new(&m.inner, k_rate, l_factor).py()
}

/// Bivariate population in file order, with an optional non-response stratum.
#[pyclass(module = "syssamp_py", frozen)]
pub struct Population {
    inner: syssamp::Population,
}

#[pymethods]
impl Population {
    #[new]
    #[pyo3(signature = (y, x, stratum=None))]
    fn new(y: Vec<f64>, x: Vec<f64>, stratum: Option<Vec<bool>>) -> PyResult<Self> {
        Ok(Self {
            inner: syssamp::Population::new(y, x, stratum).py()?,
        })
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: moments::load_population(path, &moments::LoadOptions::default()).py()?,
        })
    }

    fn write_csv(&self, path: &str) -> PyResult<()> {
        moments::write_population(&self.inner, path).py()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y().to_vec()
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x().to_vec()
    }

    #[getter]
    fn stratum(&self) -> Option<Vec<bool>> {
        self.inner.nr_stratum().map(<[bool]>::to_vec)
    }

    #[getter]
    fn mean_y(&self) -> f64 {
        self.inner.mean_y()
    }

    #[getter]
    fn mean_x(&self) -> f64 {
        self.inner.mean_x()
    }

    fn moments(&self, n: usize) -> PyResult<Moments> {
        Ok(Moments {
            inner: moments::compute_moments(&self.inner, n).py()?,
        })
    }

    /// Exact variance of the systematic sample mean over all `k` samples.
    fn enumerate_variance(&self, n: usize) -> PyResult<f64> {
        mc::enumerate_variance(&self.inner, n).py()
    }

    fn __repr__(&self) -> String {
        format!(
            "Population(N={}, stratum={})",
            self.inner.len(),
            self.inner.nr_stratum().is_some()
        )
    }
}

/// Population-level moments consumed by the first-order theory.
#[pyclass(module = "syssamp_py", frozen)]
pub struct Moments {
    inner: PopulationMoments,
}

#[pymethods]
impl Moments {
    #[new]
    #[pyo3(signature = (N, n, mean_y, mean_x, s2_y, s2_x, rho, rho_y_intra=0.0, rho_x_intra=0.0, s2_y2=None))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(
        N: usize,
        n: usize,
        mean_y: f64,
        mean_x: f64,
        s2_y: f64,
        s2_x: f64,
        rho: f64,
        rho_y_intra: f64,
        rho_x_intra: f64,
        s2_y2: Option<f64>,
    ) -> PyResult<Self> {
        let inner = MomentsFile {
            population_size: N,
            sample_size: n,
            interval: None,
            mean_y,
            mean_x,
            s2_y,
            s2_x,
            rho,
            rho_y_intra: Some(rho_y_intra),
            rho_x_intra: Some(rho_x_intra),
            s2_y2,
        }
        .into_moments()
        .py()?;
        inner.validate().py()?;
        Ok(Self { inner })
    }

    /// Read a flat JSON moments file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: MomentsFile::read(path).py()?.into_moments().py()?,
        })
    }

    /// Copy with one or more fields replaced, e.g. `m.replace(rho_y_intra=0.5)`.
    #[pyo3(signature = (**fields))]
    fn replace(&self, fields: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut inner = self.inner;
        if let Some(fields) = fields {
            for (key, value) in fields.iter() {
                let key: String = key.extract()?;
                inner.set(&key, value.extract()?).py()?;
            }
        }
        inner.validate().py()?;
        Ok(Self { inner })
    }

    /// Shorthand for setting both intraclass correlations.
    fn with_intra(&self, rho_intra: f64) -> PyResult<Self> {
        let mut inner = self.inner;
        inner.rho_y_intra = rho_intra;
        inner.rho_x_intra = rho_intra;
        inner.validate().py()?;
        Ok(Self { inner })
    }

    #[getter]
    #[allow(non_snake_case)]
    fn N(&self) -> usize {
        self.inner.population_size
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.sample_size
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.interval
    }

    #[getter]
    fn mean_y(&self) -> f64 {
        self.inner.mean_y
    }

    #[getter]
    fn mean_x(&self) -> f64 {
        self.inner.mean_x
    }

    #[getter]
    fn s2_y(&self) -> f64 {
        self.inner.s2_y
    }

    #[getter]
    fn s2_x(&self) -> f64 {
        self.inner.s2_x
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn rho_y_intra(&self) -> f64 {
        self.inner.rho_y_intra
    }

    #[getter]
    fn rho_x_intra(&self) -> f64 {
        self.inner.rho_x_intra
    }

    #[getter]
    fn s2_y2(&self) -> Option<f64> {
        self.inner.s2_y2
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    fn coefficients(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &moments::derive_coefficients(&self.inner).py()?)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &self.inner)
    }

    /// Variance of the Hansen-Hurwitz mean at non-response rate `K` and
    /// sub-sampling factor `L`.
    #[pyo3(signature = (K=0.0, L=1.0))]
    #[allow(non_snake_case)]
    fn variance_hh(&self, K: f64, L: f64) -> PyResult<f64> {
        theory::variance_hh(&self.inner, K, L).py()
    }

    fn __repr__(&self) -> String {
        serde_json::to_string(&self.inner).unwrap_or_default()
    }
}

/// First-order bias and MSE of an estimator given as a dict such as
/// `{"kind": "t3", "w": 0.9}`.
#[pyfunction]
#[pyo3(signature = (moments, spec, K=0.0, L=1.0))]
#[allow(non_snake_case)]
fn mse(
    py: Python<'_>,
    moments: &Moments,
    spec: &Bound<'_, PyAny>,
    K: f64,
    L: f64,
) -> PyResult<Py<PyAny>> {
    let spec: EstimatorSpec = from_python(py, spec)?;
    let report = theory::mse_first_order(&spec, &setting(moments, K, L)?).py()?;
    to_python(py, &report)
}

/// Optimum constants of a family with their MSE and PRE.
#[pyfunction]
#[pyo3(signature = (moments, family, K=0.0, L=1.0))]
#[allow(non_snake_case)]
fn optimum(py: Python<'_>, moments: &Moments, family: &str, K: f64, L: f64) -> PyResult<Py<PyAny>> {
    let family: Family = family.parse().py()?;
    let s = setting(moments, K, L)?;
    let report = theory::optimum_report(family, &s, &ShrinkagePolicy::default()).py()?;
    let pre = theory::pre(&s, &report).py()?;
    to_python(py, &serde_json::json!({ "report": report, "pre": pre }))
}

/// Estimate from realised sample means.
#[pyfunction]
#[pyo3(signature = (spec, y_hh, x_bar, x_pop, slope=None))]
fn estimate(
    py: Python<'_>,
    spec: &Bound<'_, PyAny>,
    y_hh: f64,
    x_bar: f64,
    x_pop: f64,
    slope: Option<f64>,
) -> PyResult<f64> {
    let spec: EstimatorSpec = from_python(py, spec)?;
    syssamp::estimate::evaluate_means(&spec, y_hh, x_bar, x_pop, slope).py()
}

/// PRE grid plus its comparison with the forest-strip reference table.
#[pyfunction]
#[pyo3(signature = (moments, k_grid, l_grid, estimators="t1..t6"))]
fn pre_table(
    py: Python<'_>,
    moments: &Moments,
    k_grid: Vec<f64>,
    l_grid: Vec<f64>,
    estimators: &str,
) -> PyResult<Py<PyAny>> {
    let table = theory::pre_table(
        &moments.inner,
        &families(estimators)?,
        &k_grid,
        &l_grid,
        &ShrinkagePolicy::default(),
    )
    .py()?;
    let discrepancy = theory::discrepancy_report(
        &table,
        &ReferenceTable::forest_strips(),
        &DiscrepancyTolerances::default(),
    );
    to_python(
        py,
        &serde_json::json!({ "table": table, "discrepancy": discrepancy }),
    )
}

/// Synthetic population with exact unit-level and intraclass correlations.
#[pyfunction]
#[pyo3(signature = (N, n, rho, intra=0.6, sorted=true, nr_fraction=0.25, seed=7, mean_x=100.0, mean_y=280.0, cv_x=0.1, cv_y=0.1))]
#[allow(non_snake_case, clippy::too_many_arguments)]
fn synthesize(
    N: usize,
    n: usize,
    rho: f64,
    intra: f64,
    sorted: bool,
    nr_fraction: f64,
    seed: u64,
    mean_x: f64,
    mean_y: f64,
    cv_x: f64,
    cv_y: f64,
) -> PyResult<Population> {
    let params = SynthesisParams {
        population_size: N,
        sample_size: n,
        target_rho: rho,
        target_intra: intra,
        sorted,
        nr_fraction,
        seed,
        mean_x,
        mean_y,
        cv_x,
        cv_y,
    };
    Ok(Population {
        inner: mc::synthesize_population(&params).py()?,
    })
}

/// Monte Carlo run at the optimum constants of `estimators`, returned with
/// its comparison against the first-order formulas.
#[pyfunction]
#[pyo3(signature = (population, n, reps=50_000, K=0.1, L=2.0, seed=42, estimators="all", mechanism="bernoulli", exhaustive=true))]
#[allow(non_snake_case, clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    population: &Population,
    n: usize,
    reps: usize,
    K: f64,
    L: f64,
    seed: u64,
    estimators: &str,
    mechanism: &str,
    exhaustive: bool,
) -> PyResult<Py<PyAny>> {
    let mechanism = match mechanism {
        "bernoulli" => Mechanism::Bernoulli { rate: K },
        "stratum" => Mechanism::Stratum,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mechanism {other:?}"
            )))
        }
    };
    let mut cfg = SimulationConfig {
        sample_size: n,
        replications: reps,
        base_seed: seed,
        mechanism,
        k_rate: K,
        l_factor: L,
        estimators: Vec::new(),
        start_selection: if exhaustive {
            StartSelection::ExhaustiveCycle
        } else {
            StartSelection::UniformRandom
        },
        trace: false,
    };
    let m = mc::theory_moments(&population.inner, &cfg).py()?;
    let s = Setting::new(&m, K, L).py()?;
    for family in families(estimators)? {
        cfg.estimators
            .push(theory::optimum_constants(family, &s, &ShrinkagePolicy::default()).py()?);
    }
    let report = py
        .detach(|| mc::run_replications(&population.inner, &cfg))
        .py()?;
    let comparison = mc::compare_theory_empirical(&report, &report.theory()).py()?;
    to_python(
        py,
        &serde_json::json!({ "report": report, "comparison": comparison }),
    )
}

#[pymodule]
fn syssamp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Population>()?;
    m.add_class::<Moments>()?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(optimum, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(pre_table, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
