//! Python bindings.
//!
//! Action sets cross the boundary as sorted lists of action ids, points as
//! `(x, y)` tuples, and benchmark records as plain dicts.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use robust_select::bench::{self, BenchConfig, Summary, TrialResult};
use robust_select::solvers::{self, brute_force_maxmin, Algorithm, Epsilon, SolverParams};
use robust_select::{ActionSet, AgentObjectives, Error, Matroid, Point2, SurrogateOracle};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn points(raw: Vec<(f64, f64)>) -> Vec<Point2> {
    raw.into_iter().map(|(x, y)| Point2::new(x, y)).collect()
}

fn action_set(scenario: &robust_select::Scenario, ids: Vec<usize>) -> PyResult<ActionSet> {
    let m = scenario.n_actions();
    if let Some(&bad) = ids.iter().find(|&&e| e >= m) {
        return Err(PyValueError::new_err(format!("action {bad} out of range (M = {m})")));
    }
    Ok(ids.into_iter().collect())
}

/// Agents, candidate actions and the matroid constraining the selection.
#[pyclass(frozen, module = "robust_select_py")]
struct Scenario {
    inner: robust_select::Scenario,
}

#[pymethods]
impl Scenario {
    /// Scenario with a uniform matroid: at most `rank` actions.
    #[staticmethod]
    fn uniform(agents: Vec<(f64, f64)>, actions: Vec<(f64, f64)>, rank: usize) -> PyResult<Self> {
        let m = actions.len();
        let inner = robust_select::Scenario::new(points(agents), points(actions), Matroid::uniform(m, rank))
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Scenario with a partition matroid; `capacity` is either one bound for
    /// every block or a list with one bound per block.
    #[staticmethod]
    fn partition(
        agents: Vec<(f64, f64)>,
        actions: Vec<(f64, f64)>,
        blocks: Vec<Vec<usize>>,
        capacity: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        let m = actions.len();
        let capacities = match capacity.extract::<usize>() {
            Ok(c) => vec![c; blocks.len()],
            Err(_) => capacity.extract::<Vec<usize>>()?,
        };
        let matroid = Matroid::partition_with_capacities(m, blocks, capacities).map_err(to_py)?;
        let inner = robust_select::Scenario::new(points(agents), points(actions), matroid).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = robust_select::Scenario::from_json_str(text).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let inner = robust_select::Scenario::from_json_file(path).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n_agents(&self) -> usize {
        self.inner.n_agents()
    }

    #[getter]
    fn n_actions(&self) -> usize {
        self.inner.n_actions()
    }

    #[getter]
    fn agents(&self) -> Vec<(f64, f64)> {
        self.inner.agents().iter().map(|p| (p.x, p.y)).collect()
    }

    #[getter]
    fn actions(&self) -> Vec<(f64, f64)> {
        self.inner.actions().iter().map(|p| (p.x, p.y)).collect()
    }

    fn distance(&self, agent: usize, action: usize) -> PyResult<f64> {
        if agent >= self.inner.n_agents() || action >= self.inner.n_actions() {
            return Err(PyValueError::new_err("agent or action out of range"));
        }
        Ok(self.inner.distance(agent, action))
    }

    /// Distance from `agent` to its farthest selected action (0 for none).
    fn proximity(&self, agent: usize, selected: Vec<usize>) -> PyResult<f64> {
        let set = action_set(&self.inner, selected)?;
        self.inner.proximity(agent, &set).map_err(to_py)
    }

    /// Worst agent's proximity value.
    fn min_value(&self, selected: Vec<usize>) -> PyResult<f64> {
        let set = action_set(&self.inner, selected)?;
        Ok(self.inner.min_value(&set))
    }

    /// Truncated average `(1/N) Σ min(h_i(S), gamma)`.
    fn surrogate(&self, gamma: f64, selected: Vec<usize>) -> PyResult<f64> {
        let set = action_set(&self.inner, selected)?;
        let mut f = SurrogateOracle::new(&self.inner, gamma).map_err(to_py)?;
        Ok(f.value(&set))
    }

    fn is_independent(&self, selected: Vec<usize>) -> PyResult<bool> {
        use robust_select::IndependenceOracle;
        let set = action_set(&self.inner, selected)?;
        Ok(self.inner.matroid().is_independent(&set))
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(n_agents={}, n_actions={})",
            self.inner.n_agents(),
            self.inner.n_actions()
        )
    }
}

#[pyclass(frozen, module = "robust_select_py")]
struct Solution {
    inner: solvers::Solution,
}

#[pymethods]
impl Solution {
    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm.name()
    }

    #[getter]
    fn selected(&self) -> Vec<usize> {
        self.inner.selected.to_vec()
    }

    #[getter]
    fn min_value(&self) -> f64 {
        self.inner.min_value
    }

    /// Surrogate-equivalent evaluation count.
    #[getter]
    fn evaluations(&self) -> f64 {
        self.inner.f_evaluations()
    }

    #[getter]
    fn individual_evaluations(&self) -> u64 {
        self.inner.evaluations.individual()
    }

    #[getter]
    fn wall_time_ms(&self) -> f64 {
        self.inner.wall_time_ms()
    }

    /// `(lower, upper, gamma, value, accepted)` per bisection iteration.
    #[getter]
    fn bisection(&self) -> Vec<(f64, f64, f64, f64, bool)> {
        self.inner
            .bisection
            .iter()
            .map(|s| (s.lower, s.upper, s.gamma, s.value, s.accepted))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(algorithm={:?}, selected={:?}, min_value={})",
            self.inner.algorithm.name(),
            self.inner.selected.to_vec(),
            self.inner.min_value
        )
    }
}

fn params(delta: f64, epsilon: Option<f64>, curvature: f64) -> PyResult<SolverParams> {
    let p = SolverParams {
        delta,
        epsilon: epsilon.map_or(SolverParams::default().epsilon, Epsilon::Absolute),
        curvature,
    };
    p.validate().map_err(to_py)?;
    Ok(p)
}

/// Runs `algorithm` (`fast`, `greedy`, `ratio` or `brute`) on `scenario`.
/// `epsilon` is an absolute bisection gap; by default it is 1e-3 of the
/// initial upper bound.
#[pyfunction]
#[pyo3(signature = (scenario, algorithm = "fast", delta = 1e-3, epsilon = None, curvature = 1.0))]
fn solve(
    py: Python<'_>,
    scenario: &Scenario,
    algorithm: &str,
    delta: f64,
    epsilon: Option<f64>,
    curvature: f64,
) -> PyResult<Solution> {
    let algorithm: Algorithm = algorithm.parse().map_err(to_py)?;
    let p = params(delta, epsilon, curvature)?;
    let inner = py
        .detach(|| solvers::solve(&scenario.inner, algorithm, &p))
        .map_err(to_py)?;
    Ok(Solution { inner })
}

#[pyfunction]
fn brute_force(scenario: &Scenario) -> PyResult<Solution> {
    let inner = brute_force_maxmin(&scenario.inner).map_err(to_py)?;
    Ok(Solution { inner })
}

/// Random benchmark scenario: uniform positions on the square with the
/// quadrant partition matroid of capacity `z`.
#[pyfunction]
#[pyo3(signature = (z, seed, n_agents = 5, n_actions = 50, region = 100.0))]
fn generate_scenario(z: usize, seed: u64, n_agents: usize, n_actions: usize, region: f64) -> PyResult<Scenario> {
    let config = BenchConfig {
        n_agents,
        n_actions,
        region,
        ..BenchConfig::default()
    };
    config.validate().map_err(to_py)?;
    let inner = bench::generate_scenario(&config, z, seed).map_err(to_py)?;
    Ok(Scenario { inner })
}

fn trial_dict<'py>(py: Python<'py>, r: &TrialResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("z", r.z)?;
    d.set_item("trial", r.trial)?;
    d.set_item("algorithm", r.algorithm.name())?;
    d.set_item("objective", r.objective)?;
    d.set_item("evaluations", r.evaluations)?;
    d.set_item("wall_time_ms", r.wall_time_ms)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

fn summary_dict<'py>(py: Python<'py>, s: &Summary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("z", s.z)?;
    d.set_item("algorithm", s.algorithm.name())?;
    d.set_item("mean_objective", s.mean_objective)?;
    d.set_item("sd_objective", s.sd_objective)?;
    d.set_item("mean_evaluations", s.mean_evaluations)?;
    d.set_item("sd_evaluations", s.sd_evaluations)?;
    d.set_item("mean_wall_time_ms", s.mean_wall_time_ms)?;
    Ok(d)
}

type Records<'py> = Vec<Bound<'py, PyDict>>;

/// Monte Carlo benchmark. Returns `(results, summary)` as lists of dicts.
#[pyfunction]
#[pyo3(signature = (
    algorithms = vec!["fast".to_owned(), "ratio".to_owned()],
    trials = 100,
    z_min = 1,
    z_max = 10,
    seed = 1,
    n_agents = 5,
    n_actions = 50,
    region = 100.0,
    delta = 1e-3,
    timing = false,
))]
#[allow(clippy::too_many_arguments)]
fn run_benchmark<'py>(
    py: Python<'py>,
    algorithms: Vec<String>,
    trials: usize,
    z_min: usize,
    z_max: usize,
    seed: u64,
    n_agents: usize,
    n_actions: usize,
    region: f64,
    delta: f64,
    timing: bool,
) -> PyResult<(Records<'py>, Records<'py>)> {
    let config = BenchConfig {
        n_agents,
        n_actions,
        region,
        z_min,
        z_max,
        trials,
        base_seed: seed,
        delta,
        record_timing: timing,
        ..BenchConfig::default()
    };
    config.validate().map_err(to_py)?;
    let algorithms = bench::parse_algorithms(&algorithms.join(",")).map_err(to_py)?;
    let (results, summaries) = py
        .detach(|| {
            let results = bench::run_benchmark(&config, &algorithms)?;
            let summaries = bench::aggregate(&results)?;
            Ok::<_, Error>((results, summaries))
        })
        .map_err(to_py)?;
    let results = results.iter().map(|r| trial_dict(py, r)).collect::<PyResult<_>>()?;
    let summaries = summaries.iter().map(|s| summary_dict(py, s)).collect::<PyResult<_>>()?;
    Ok((results, summaries))
}

#[pymodule]
fn robust_select_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    Ok(())
}
