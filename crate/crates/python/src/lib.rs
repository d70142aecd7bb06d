//! Python bindings. Scenarios come from JSON (the same schema the CLI reads)
//! or from a few plain parameters; results expose the metric series, energy
//! totals and grouping events as Python values.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use swarm_morph::energy::PowerModel as CorePowerModel;
use swarm_morph::engine::{self, PlanPolicy, RunOutput, Scenario as CoreScenario};
use swarm_morph::geometry::{mirror_scenario, FormationSpec, Obstacle, SwarmConfig, Vec2};
use swarm_morph::{grouping, io, reformation, sensing};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Piecewise-linear power curve over (speed, power) samples.
#[pyclass(name = "PowerModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PowerModel {
    inner: CorePowerModel,
}

#[pymethods]
impl PowerModel {
    #[new]
    fn new(samples: Vec<(f64, f64)>) -> PyResult<Self> {
        CorePowerModel::new(samples).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn default_quadrotor() -> Self {
        Self { inner: CorePowerModel::default_quadrotor() }
    }

    fn power_at(&self, speed: f64) -> f64 {
        self.inner.power_at(speed)
    }

    fn endurance_speed(&self) -> f64 {
        self.inner.endurance_speed()
    }

    fn samples(&self) -> Vec<(f64, f64)> {
        self.inner.samples().to_vec()
    }
}

#[pyclass(name = "Scenario", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: CoreScenario,
    file: Option<io::ScenarioFile>,
}

#[pymethods]
impl Scenario {
    /// Nested-V swarm starting at `start` and heading along +y towards
    /// `goal`. Obstacles are `(cx, cy, half_width, half_depth)` tuples.
    #[new]
    #[pyo3(signature = (n_agents, goal, obstacles=Vec::new(), spacing=4.0, start=(0.0, 0.0)))]
    fn new(
        n_agents: usize,
        goal: (f64, f64),
        obstacles: Vec<(f64, f64, f64, f64)>,
        spacing: f64,
        start: (f64, f64),
    ) -> PyResult<Self> {
        let formation = FormationSpec::nested_v(n_agents, spacing, Vec2::UNIT_Y).map_err(value_err)?;
        let cfg = SwarmConfig::with_defaults(formation, Vec2::new(start.0, start.1), Vec2::new(goal.0, goal.1));
        cfg.validate().map_err(value_err)?;
        let obstacles = obstacles
            .iter()
            .enumerate()
            .map(|(i, &(x, y, w, d))| Obstacle::new(i as u32, Vec2::new(x, y), w, d))
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_err)?;
        Ok(Self { inner: CoreScenario::new(cfg, obstacles), file: None })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = io::parse_scenario(text).map_err(value_err)?;
        let inner = file.to_scenario().map_err(value_err)?;
        Ok(Self { inner, file: Some(file) })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let file = io::load_scenario(&path).map_err(value_err)?;
        let inner = file.to_scenario().map_err(value_err)?;
        Ok(Self { inner, file: Some(file) })
    }

    /// Config echo with every default filled in. Only for JSON-built scenarios.
    fn to_json(&self) -> PyResult<String> {
        let file = self.file.as_ref().ok_or_else(|| PyValueError::new_err("scenario was not built from JSON"))?;
        io::config_echo(file).map_err(value_err)
    }

    fn mirrored(&self) -> Self {
        let (swarm, obstacles) = mirror_scenario(&self.inner.swarm, &self.inner.obstacles);
        Self { inner: CoreScenario { swarm, obstacles, ..self.inner.clone() }, file: None }
    }

    #[getter]
    fn n_agents(&self) -> usize {
        self.inner.swarm.n_agents
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.swarm.dt
    }

    #[getter]
    fn obstacles(&self) -> Vec<(f64, f64, f64, f64)> {
        self.inner.obstacles.iter().map(|o| (o.center.x, o.center.y, o.half_width, o.half_depth)).collect()
    }

    fn with_power(&self, model: &PowerModel) -> Self {
        let mut s = self.clone();
        s.inner.power = model.inner.clone();
        s
    }

    fn with_time_budget(&self, seconds: f64) -> PyResult<Self> {
        if !(seconds > 0.0 && seconds.is_finite()) {
            return Err(PyValueError::new_err("time budget must be positive"));
        }
        let mut s = self.clone();
        s.inner.time_budget = Some(seconds);
        Ok(s)
    }
}

/// Outputs of one simulation.
#[pyclass(name = "RunResult", frozen)]
struct RunResult {
    inner: RunOutput,
}

#[pymethods]
impl RunResult {
    #[getter]
    fn complete(&self) -> bool {
        self.inner.complete
    }

    #[getter]
    fn ticks(&self) -> u64 {
        self.inner.final_state.tick
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy.swarm_total()
    }

    #[getter]
    fn transit_energy(&self) -> f64 {
        self.inner.transit_energy.swarm_total()
    }

    #[getter]
    fn energy_per_agent(&self) -> Vec<f64> {
        self.inner.energy.per_agent.clone()
    }

    /// Seconds from the first split until its last member passed the obstacle.
    #[getter]
    fn first_transit_time(&self) -> Option<f64> {
        self.inner.first_transit_time()
    }

    #[getter]
    fn phase_log(&self) -> Vec<(u64, String)> {
        self.inner.phase_log.iter().map(|(t, p)| (*t, p.to_string())).collect()
    }

    #[getter]
    fn final_positions(&self) -> Vec<(f64, f64)> {
        self.inner.final_state.agents.iter().map(|a| (a.pos.x, a.pos.y)).collect()
    }

    /// One dict per grouping event.
    fn events<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .events
            .iter()
            .map(|e| {
                let d = PyDict::new(py);
                d.set_item("tick", e.tick)?;
                d.set_item("group", e.group.to_string())?;
                d.set_item("members", e.members.clone())?;
                d.set_item("sizes", e.plan.sizes.clone())?;
                d.set_item("predicted_time", e.plan.predicted_time)?;
                d.set_item("transit_time", e.transit_ticks().map(|t| t as f64 * self.inner.dt))?;
                Ok(d)
            })
            .collect()
    }

    /// Column name to list of values, one entry per tick.
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rows = &self.inner.metrics.rows;
        let d = PyDict::new(py);
        d.set_item("tick", rows.iter().map(|r| r.tick).collect::<Vec<_>>())?;
        d.set_item("time_s", rows.iter().map(|r| r.time).collect::<Vec<_>>())?;
        d.set_item("mean_speed", rows.iter().map(|r| r.mean_speed).collect::<Vec<_>>())?;
        d.set_item("std_speed", rows.iter().map(|r| r.std_speed).collect::<Vec<_>>())?;
        d.set_item("mean_nn_dist", rows.iter().map(|r| r.mean_nn_dist).collect::<Vec<_>>())?;
        d.set_item("std_nn_dist", rows.iter().map(|r| r.std_nn_dist).collect::<Vec<_>>())?;
        d.set_item("min_pair_dist", rows.iter().map(|r| r.min_pair_dist).collect::<Vec<_>>())?;
        d.set_item("min_obstacle_clearance", rows.iter().map(|r| r.min_obstacle_clearance).collect::<Vec<_>>())?;
        d.set_item("phase", rows.iter().map(|r| r.phase.to_string()).collect::<Vec<_>>())?;
        Ok(d)
    }

    /// Writes positions.csv, metrics.csv and energy.csv into `out_dir`.
    fn write(&self, out_dir: PathBuf) -> PyResult<()> {
        io::emit_trace(&self.inner, &out_dir, &io::OutputPaths::default()).map_err(value_err)
    }
}

#[pyfunction]
fn run(scenario: &Scenario) -> PyResult<RunResult> {
    engine::run(&scenario.inner).map(|inner| RunResult { inner }).map_err(value_err)
}

#[pyfunction]
fn run_baseline(scenario: &Scenario) -> PyResult<RunResult> {
    engine::run_baseline(&scenario.inner).map(|inner| RunResult { inner }).map_err(value_err)
}

/// Runs with the first split forced to `sizes` (left to right).
#[pyfunction]
fn run_forced(scenario: &Scenario, sizes: Vec<usize>) -> PyResult<RunResult> {
    engine::run_with_policy(&scenario.inner, &PlanPolicy::ForcedSplit(sizes))
        .map(|inner| RunResult { inner })
        .map_err(value_err)
}

/// `(k_left, k_right, time_s or None)` for every two-way split.
#[pyfunction]
fn sweep_splits(scenario: &Scenario) -> PyResult<Vec<(usize, usize, Option<f64>)>> {
    let rows = io::sweep_splits(&scenario.inner).map_err(value_err)?;
    Ok(rows.into_iter().map(|r| (r.k_left, r.k_right, r.time_s)).collect())
}

/// Proposed and baseline energies with the percentage deltas.
#[pyfunction]
fn compare_baseline<'py>(py: Python<'py>, scenario: &Scenario) -> PyResult<Bound<'py, PyDict>> {
    let c = io::compare_baseline(&scenario.inner).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("proposed_energy", c.proposed.energy.swarm_total())?;
    d.set_item("baseline_energy", c.baseline.energy.swarm_total())?;
    d.set_item("energy_delta_pct", c.energy_delta_pct())?;
    d.set_item("proposed_transit_energy", c.proposed.transit_energy.swarm_total())?;
    d.set_item("baseline_transit_energy", c.baseline.transit_energy.swarm_total())?;
    d.set_item("transit_energy_delta_pct", c.transit_energy_delta_pct())?;
    d.set_item("proposed_transit_time", c.proposed.first_transit_time())?;
    d.set_item("baseline_transit_time", c.baseline.first_transit_time())?;
    Ok(d)
}

/// Minimum squared-distance matching; returns `(mapping, total_cost)` with
/// `mapping[i]` the target of source `i`.
#[pyfunction]
fn solve_assignment(sources: Vec<(f64, f64)>, targets: Vec<(f64, f64)>) -> PyResult<(Vec<usize>, f64)> {
    let to_vec = |v: Vec<(f64, f64)>| v.into_iter().map(|(x, y)| Vec2::new(x, y)).collect::<Vec<_>>();
    let problem = reformation::AssignmentProblem::new(to_vec(sources), to_vec(targets)).map_err(value_err)?;
    let a = reformation::solve_assignment(&problem).map_err(value_err)?;
    Ok((a.mapping, a.total_cost))
}

/// `(d_s, d_r, d_b)` in metres.
#[pyfunction]
#[pyo3(signature = (v, g=9.81, c_d=0.3, t_c=0.0))]
fn stopping_distance(v: f64, g: f64, c_d: f64, t_c: f64) -> PyResult<(f64, f64, f64)> {
    let s = sensing::stopping_distance(v, g, c_d, t_c).map_err(value_err)?;
    Ok((s.stopping, s.reaction, s.braking))
}

#[pyfunction]
fn time_to_impact(distance: f64, speed: f64) -> PyResult<f64> {
    sensing::time_to_impact(distance, speed).map_err(value_err)
}

#[pyfunction]
fn population_factor(obstacle_count: usize) -> usize {
    grouping::population_factor(obstacle_count)
}

#[pymodule]
#[pyo3(name = "swarm_morph")]
fn swarm_morph_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PowerModel>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(run_forced, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_splits, m)?)?;
    m.add_function(wrap_pyfunction!(compare_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(solve_assignment, m)?)?;
    m.add_function(wrap_pyfunction!(stopping_distance, m)?)?;
    m.add_function(wrap_pyfunction!(time_to_impact, m)?)?;
    m.add_function(wrap_pyfunction!(population_factor, m)?)?;
    Ok(())
}
