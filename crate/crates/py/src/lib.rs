//! Python bindings: `import nasearch`.

use nasearch_core::analytic::{self, LimitProbability};
use nasearch_core::cli::verify::{run_verify, Suite};
use nasearch_core::model;
use nasearch_core::propagator::{self, Trajectory as CoreTrajectory, DEFAULT_TOL};
use nasearch_core::specfun;
use nasearch_core::sweep::{self as core_sweep, GridN, GridSpec};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn grid_n(n: Option<u64>) -> Result<GridN, PyErr> {
    match n {
        None => Ok(GridN::Infinite),
        Some(n) if n >= 2 => Ok(GridN::Finite(n)),
        Some(n) => Err(value_err(format!("N = {n} must be >= 2"))),
    }
}

/// Algorithm I schedule: gap |αt + γ| and a mixing angle rotating at 2Ω₀.
#[pyclass(name = "ScheduleI", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyScheduleI(model::ScheduleI);

#[pymethods]
impl PyScheduleI {
    #[new]
    #[pyo3(signature = (n, epsilon = 1.0, alpha = 1.0))]
    fn new(n: u64, epsilon: f64, alpha: f64) -> PyResult<Self> {
        model::ScheduleI::new(n, epsilon, alpha).map(Self).map_err(value_err)
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau()
    }

    /// Level crossing −γ/α, or None when α ≥ 0.
    #[getter]
    fn tc(&self) -> Option<f64> {
        self.0.tc()
    }

    fn theta(&self, t: f64) -> f64 {
        self.0.theta(t)
    }

    fn omega(&self, t: f64) -> f64 {
        self.0.omega(t)
    }

    /// (f, g) coefficients at time t.
    fn fg(&self, t: f64) -> (f64, f64) {
        model::schedule_i_fg(&self.0, t)
    }

    fn peak_times(&self, l_max: u32) -> Vec<f64> {
        analytic::alg_i_peak_times(&self.0, l_max)
    }

    /// sin²(Ω₀t).
    fn resonance_p_s(&self, t: f64) -> f64 {
        analytic::alg_i_approx_probs(&self.0, t).0
    }

    fn __repr__(&self) -> String {
        format!("ScheduleI(n={}, epsilon={}, alpha={})", self.0.n, self.0.epsilon, self.0.alpha)
    }
}

/// Algorithm II schedule: linear sweep g(t) = a·t − b.
#[pyclass(name = "ScheduleII", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyScheduleII(model::ScheduleII);

#[pymethods]
impl PyScheduleII {
    #[new]
    fn new(n: u64, a: f64, b: f64) -> PyResult<Self> {
        model::ScheduleII::new(n, a, b).map(Self).map_err(value_err)
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }

    #[getter]
    fn tc(&self) -> f64 {
        self.0.tc()
    }

    fn omega(&self, t: f64) -> f64 {
        self.0.omega(t)
    }

    fn __repr__(&self) -> String {
        format!("ScheduleII(n={}, a={}, b={})", self.0.n, self.0.a, self.0.b)
    }
}

#[pyclass(name = "Trajectory", frozen)]
pub struct PyTrajectory(CoreTrajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.0.times()
    }

    #[getter]
    fn p_s(&self) -> Vec<f64> {
        self.0.p_s()
    }

    #[getter]
    fn p_p(&self) -> Vec<f64> {
        self.0.samples.iter().map(|s| s.p_p).collect()
    }

    /// (a_s, a_p) per sample.
    #[getter]
    fn amplitudes(&self) -> Vec<(Complex64, Complex64)> {
        self.0.samples.iter().map(|s| (s.state.a_s, s.state.a_p)).collect()
    }

    #[getter]
    fn max_norm_drift(&self) -> f64 {
        self.0.meta.max_norm_drift
    }

    #[getter]
    fn accepted_steps(&self) -> usize {
        self.0.meta.accepted_steps
    }

    #[getter]
    fn tol(&self) -> f64 {
        self.0.meta.tol
    }

    fn __len__(&self) -> usize {
        self.0.samples.len()
    }

    fn __repr__(&self) -> String {
        format!("Trajectory(samples={}, max_norm_drift={:e})", self.0.samples.len(), self.0.meta.max_norm_drift)
    }
}

#[pyclass(name = "LimitProbability", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyLimitProbability(LimitProbability);

#[pymethods]
impl PyLimitProbability {
    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn raw(&self) -> f64 {
        self.0.raw
    }

    #[getter]
    fn estimated_error(&self) -> f64 {
        self.0.estimated_error
    }

    #[getter]
    fn accurate(&self) -> bool {
        self.0.accurate()
    }

    #[getter]
    fn clamped(&self) -> bool {
        self.0.clamped()
    }

    fn __float__(&self) -> f64 {
        self.0.value
    }

    fn __repr__(&self) -> String {
        format!("LimitProbability(value={}, estimated_error={:e})", self.0.value, self.0.estimated_error)
    }
}

#[pyfunction]
fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    propagator::uniform_grid(t_max, samples)
}

/// Fixed-basis integration of Algorithm I on `t_grid`.
#[pyfunction]
#[pyo3(signature = (schedule, t_grid, tol = DEFAULT_TOL))]
fn simulate_i(py: Python<'_>, schedule: PyScheduleI, t_grid: Vec<f64>, tol: f64) -> PyResult<PyTrajectory> {
    py.detach(|| propagator::simulate_i(&schedule.0, &t_grid, tol))
        .map(PyTrajectory)
        .map_err(runtime_err)
}

#[pyfunction]
#[pyo3(signature = (schedule, t_grid, tol = DEFAULT_TOL))]
fn simulate_ii(py: Python<'_>, schedule: PyScheduleII, t_grid: Vec<f64>, tol: f64) -> PyResult<PyTrajectory> {
    py.detach(|| propagator::simulate_ii(&schedule.0, &t_grid, tol))
        .map(PyTrajectory)
        .map_err(runtime_err)
}

/// Algorithm I amplitudes (a₊, a₋) from the parabolic-cylinder solution.
#[pyfunction]
fn alg_i_amplitudes(schedule: PyScheduleI, t: Vec<f64>) -> PyResult<Vec<(Complex64, Complex64)>> {
    let s = schedule.0;
    let sol = analytic::alg_i_solution(&s).map_err(runtime_err)?;
    t.iter()
        .map(|&t| analytic::alg_i_amplitudes(&sol, &s, t).map(|m| (m.a_plus, m.a_minus)))
        .collect::<Result<_, _>>()
        .map_err(runtime_err)
}

/// Algorithm II amplitudes (a_s, a_p) from the parabolic-cylinder solution.
#[pyfunction]
fn alg_ii_amplitudes(schedule: PyScheduleII, t: Vec<f64>) -> PyResult<Vec<(Complex64, Complex64)>> {
    let s = schedule.0;
    let sol = analytic::alg_ii_solution(s.n, s.a, s.b).map_err(runtime_err)?;
    t.iter()
        .map(|&t| analytic::alg_ii_amplitudes(&sol, t).map(|st| (st.a_s, st.a_p)))
        .collect::<Result<_, _>>()
        .map_err(runtime_err)
}

/// Limiting search probability p(a, b); `n=None` is the N → ∞ limit.
#[pyfunction]
#[pyo3(signature = (a, b, n = None))]
fn limit_prob(a: f64, b: f64, n: Option<u64>) -> PyResult<PyLimitProbability> {
    if !(a > 0.0) {
        return Err(value_err(format!("a = {a} must be > 0")));
    }
    core_sweep::limit_cell(grid_n(n)?, a, b).map(PyLimitProbability).map_err(runtime_err)
}

/// p over a regular (a, b) grid. Returns (a_values, b_values, p) with p[i][j]
/// at (a_values[j], b_values[i]) and None for cells that failed.
#[pyfunction]
#[pyo3(signature = (a_range, b_range, cells, n = None, workers = None))]
#[allow(clippy::type_complexity)]
fn sweep_ab(
    py: Python<'_>,
    a_range: (f64, f64),
    b_range: (f64, f64),
    cells: (usize, usize),
    n: Option<u64>,
    workers: Option<usize>,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<Vec<Option<f64>>>)> {
    let spec = GridSpec {
        a_min: a_range.0,
        a_max: a_range.1,
        b_min: b_range.0,
        b_max: b_range.1,
        n_a: cells.0,
        n_b: cells.1,
        n: grid_n(n)?,
    };
    spec.validate().map_err(value_err)?;
    let g = py.detach(|| core_sweep::sweep_ab(&spec, workers)).map_err(runtime_err)?;
    Ok((g.a_values, g.b_values, g.p))
}

/// D_ν(z).
#[pyfunction]
fn pcf_d(nu: Complex64, z: Complex64) -> PyResult<Complex64> {
    specfun::pcf_d(nu, z).map(|r| r.value).map_err(runtime_err)
}

#[pyfunction]
fn complex_gamma(z: Complex64) -> PyResult<Complex64> {
    specfun::complex_gamma(z).map_err(value_err)
}

/// Kummer's M(a, b, z).
#[pyfunction]
fn kummer_m(a: Complex64, b: Complex64, z: Complex64) -> PyResult<Complex64> {
    specfun::kummer_m(a, b, z).map(|k| k.value).map_err(runtime_err)
}

fn parse_suite(name: &str) -> PyResult<Suite> {
    Ok(match name {
        "all" => Suite::All,
        "specfun" => Suite::Specfun,
        "propagator" => Suite::Propagator,
        "analytic" => Suite::Analytic,
        "figures" => Suite::Figures,
        _ => return Err(value_err(format!("unknown suite {name:?}"))),
    })
}

/// Runs a verification suite; returns (passed, report as JSON text).
#[pyfunction]
#[pyo3(signature = (suite = "all", fast = true))]
fn verify(py: Python<'_>, suite: &str, fast: bool) -> PyResult<(bool, String)> {
    let suite = parse_suite(suite)?;
    let report = py.detach(|| run_verify(suite, fast));
    let text = serde_json::to_string(&report).map_err(runtime_err)?;
    Ok((report.passed, text))
}

#[pymodule]
fn nasearch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyScheduleI>()?;
    m.add_class::<PyScheduleII>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyLimitProbability>()?;
    m.add_function(wrap_pyfunction!(uniform_grid, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_i, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_ii, m)?)?;
    m.add_function(wrap_pyfunction!(alg_i_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(alg_ii_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(limit_prob, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_ab, m)?)?;
    m.add_function(wrap_pyfunction!(pcf_d, m)?)?;
    m.add_function(wrap_pyfunction!(complex_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_m, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_n_maps_none_to_infinity() {
        assert_eq!(grid_n(None).unwrap(), GridN::Infinite);
        assert_eq!(grid_n(Some(100)).unwrap(), GridN::Finite(100));
        assert!(grid_n(Some(1)).is_err());
    }

    #[test]
    fn suites_parse() {
        for s in ["all", "specfun", "propagator", "analytic", "figures"] {
            assert!(parse_suite(s).is_ok());
        }
    }

    #[test]
    fn module_exposes_api() {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "nasearch").unwrap();
            nasearch(&m).unwrap();
            for name in ["ScheduleI", "simulate_i", "limit_prob", "sweep_ab", "pcf_d", "verify"] {
                assert!(m.hasattr(name).unwrap(), "{name}");
            }
            let p: f64 = m
                .getattr("limit_prob")
                .unwrap()
                .call1((1.0, 4.5))
                .unwrap()
                .getattr("value")
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(p, analytic::alg_ii_limit_prob_inf(1.0, 4.5).unwrap().value);
        });
    }
}
