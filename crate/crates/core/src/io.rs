//! Scenario files, batch experiments and CSV output.
//!
//! A scenario is a JSON document with five blocks:
//!
//! ```json
//! {
//!   "mission":   { "start": [0, 0], "goal": [0, 180] },
//!   "formation": { "n_agents": 8, "inter_agent_distance": 4, "heading": [0, 1] },
//!   "swarm":     { "dist_safe": 2.0 },
//!   "obstacles": [ { "center": [0, 60], "half_width": 6, "half_depth": 3 } ],
//!   "power":     [[0, 240], [10, 150], [25, 700]],
//!   "experiment": { "mode": "single" }
//! }
//! ```
//!
//! Only `mission` and `formation.n_agents` are required. Unknown keys are
//! rejected, and every error names the offending field.
//!
//! All CSV floats are written with six decimals.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{relative_delta, EnergyLedger, PowerModel};
use crate::engine::{run, run_baseline, run_with_policy, Frame, MetricsSeries, PlanPolicy, RunOutput, Scenario, TraceRow};
use crate::error::{ConfigError, EngineError, OutputError, ScenarioError};
use crate::geometry::{FormationSpec, Obstacle, SwarmConfig, Vec2};

pub const POSITIONS_HEADER: [&str; 8] = ["tick", "time_s", "agent_id", "x", "y", "speed", "phase", "group"];
pub const METRICS_HEADER: [&str; 7] =
    ["tick", "time_s", "mean_speed", "std_speed", "mean_nn_dist", "std_nn_dist", "min_pair_dist"];
pub const ENERGY_HEADER: [&str; 2] = ["agent_id", "energy_J"];
pub const SWEEP_HEADER: [&str; 3] = ["k_left", "k_right", "time_s"];

/// Written in the `time_s` column of a sweep row whose split never got the
/// swarm past the obstacle.
pub const INFEASIBLE: &str = "infeasible";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mission: MissionBlock,
    pub formation: FormationBlock,
    #[serde(default)]
    pub swarm: SwarmBlock,
    #[serde(default)]
    pub obstacles: Vec<ObstacleBlock>,
    #[serde(default)]
    pub power: PowerModel,
    #[serde(default)]
    pub experiment: ExperimentBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionBlock {
    #[serde(default)]
    pub start: [f64; 2],
    pub goal: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationBlock {
    pub n_agents: usize,
    #[serde(default = "default_spacing")]
    pub inter_agent_distance: f64,
    #[serde(default = "default_heading")]
    pub heading: [f64; 2],
    /// Explicit slot offsets (x lateral to the right, y along the heading).
    /// The nested V is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<[f64; 2]>>,
}

fn default_spacing() -> f64 {
    4.0
}

fn default_heading() -> [f64; 2] {
    [0.0, 1.0]
}

/// Tunables with their documented defaults. Angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwarmBlock {
    pub detection_range: f64,
    pub dist_safe: f64,
    pub g: f64,
    pub c_d: f64,
    pub t_c: f64,
    pub dt: f64,
    pub nominal_speed: f64,
    pub speed_margin: f64,
    pub speed_cap: f64,
    pub max_accel: f64,
    pub max_turn_rate: f64,
    pub danger_margin: f64,
    pub route_margin: f64,
    pub approach_lead: f64,
    pub convergence_tolerance: f64,
    pub lookahead: f64,
}

impl Default for SwarmBlock {
    fn default() -> Self {
        let formation = FormationSpec::new(vec![Vec2::ZERO], Vec2::UNIT_Y, 1.0).expect("one slot is valid");
        let d = SwarmConfig::with_defaults(formation, Vec2::ZERO, Vec2::ZERO);
        Self {
            detection_range: d.detection_range,
            dist_safe: d.dist_safe,
            g: d.g,
            c_d: d.c_d,
            t_c: d.t_c,
            dt: d.dt,
            nominal_speed: d.nominal_speed,
            speed_margin: d.speed_margin,
            speed_cap: d.speed_cap,
            max_accel: d.max_accel,
            max_turn_rate: d.max_turn_rate,
            danger_margin: d.danger_margin,
            route_margin: d.route_margin,
            approach_lead: d.approach_lead,
            convergence_tolerance: d.convergence_tolerance,
            lookahead: d.lookahead,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleBlock {
    /// Defaults to the position in the list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub center: [f64; 2],
    pub half_width: f64,
    pub half_depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Single,
    SweepSplits,
    CompareBaseline,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    pub mode: Mode,
    /// Simulated seconds; see [`Scenario::time_budget`] for the default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_budget: Option<f64>,
    pub seed: u64,
    pub outputs: OutputPaths,
}

/// File names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub positions: String,
    pub metrics: String,
    pub energy: String,
    pub sweep: String,
    pub comparison: String,
    pub config_echo: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            positions: "positions.csv".into(),
            metrics: "metrics.csv".into(),
            energy: "energy.csv".into(),
            sweep: "sweep.csv".into(),
            comparison: "comparison.csv".into(),
            config_echo: "config.json".into(),
        }
    }
}

impl ScenarioFile {
    /// Builds and validates the engine scenario.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        let f = &self.formation;
        let heading = Vec2::from(f.heading);
        let formation = match &f.slots {
            Some(slots) => {
                if slots.len() != f.n_agents {
                    return Err(ConfigError::invalid(
                        "formation.slots",
                        format!("{} slots for {} agents", slots.len(), f.n_agents),
                    )
                    .into());
                }
                FormationSpec::new(slots.iter().map(|&s| Vec2::from(s)).collect(), heading, f.inter_agent_distance)?
            }
            None => {
                if f.n_agents == 0 {
                    return Err(ConfigError::invalid("formation.n_agents", "must be at least 1").into());
                }
                FormationSpec::nested_v(f.n_agents, f.inter_agent_distance, heading)?
            }
        };
        let s = &self.swarm;
        let swarm = SwarmConfig {
            detection_range: s.detection_range,
            dist_safe: s.dist_safe,
            g: s.g,
            c_d: s.c_d,
            t_c: s.t_c,
            dt: s.dt,
            nominal_speed: s.nominal_speed,
            speed_margin: s.speed_margin,
            speed_cap: s.speed_cap,
            max_accel: s.max_accel,
            max_turn_rate: s.max_turn_rate,
            danger_margin: s.danger_margin,
            route_margin: s.route_margin,
            approach_lead: s.approach_lead,
            convergence_tolerance: s.convergence_tolerance,
            lookahead: s.lookahead,
            ..SwarmConfig::with_defaults(formation, self.mission.start.into(), self.mission.goal.into())
        };
        swarm.validate()?;
        Frame::new(swarm.start, swarm.formation.heading())?;
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, o) in self.obstacles.iter().enumerate() {
            let id = o.id.unwrap_or(i as u32);
            let ob = Obstacle::new(id, o.center.into(), o.half_width, o.half_depth).map_err(|e| match e {
                ConfigError::Invalid { field, reason } => ConfigError::Invalid {
                    field: format!("obstacles[{i}].{}", field.trim_start_matches("obstacle.")),
                    reason,
                },
            })?;
            if obstacles.iter().any(|p: &Obstacle| p.id == id) {
                return Err(ConfigError::invalid(format!("obstacles[{i}].id"), format!("duplicate id {id}")).into());
            }
            obstacles.push(ob);
        }
        if let Some(b) = self.experiment.time_budget {
            if !(b > 0.0 && b.is_finite()) {
                return Err(ConfigError::invalid("experiment.time_budget", "must be positive").into());
            }
        }
        Ok(Scenario {
            swarm,
            obstacles,
            power: self.power.clone(),
            time_budget: self.experiment.time_budget,
            seed: self.experiment.seed,
        })
    }
}

/// Parses and validates scenario JSON.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    file.to_scenario()?;
    Ok(file)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Read { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}

/// Pretty JSON with every default filled in; [`parse_scenario`] reads it back
/// to an equal value.
pub fn config_echo(file: &ScenarioFile) -> Result<String, OutputError> {
    Ok(serde_json::to_string_pretty(file)?)
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, OutputError> {
    csv::Writer::from_path(path).map_err(|source| OutputError::Csv { path: path.to_path_buf(), source })
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), OutputError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    let err = |source| OutputError::Csv { path: path.to_path_buf(), source };
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.flush().map_err(|source| OutputError::Io { path: path.to_path_buf(), source })
}

pub fn write_positions(path: &Path, trace: &[TraceRow]) -> Result<(), OutputError> {
    write_rows(
        path,
        &POSITIONS_HEADER,
        trace.iter().map(|r| {
            vec![
                r.tick.to_string(),
                f6(r.time),
                r.agent_id.to_string(),
                f6(r.pos.x),
                f6(r.pos.y),
                f6(r.speed),
                r.phase.to_string(),
                r.group.clone(),
            ]
        }),
    )
}

pub fn write_metrics(path: &Path, metrics: &MetricsSeries) -> Result<(), OutputError> {
    write_rows(
        path,
        &METRICS_HEADER,
        metrics.rows.iter().map(|r| {
            vec![
                r.tick.to_string(),
                f6(r.time),
                f6(r.mean_speed),
                f6(r.std_speed),
                f6(r.mean_nn_dist),
                f6(r.std_nn_dist),
                f6(r.min_pair_dist),
            ]
        }),
    )
}

/// One row per agent, then a `total` row.
pub fn write_energy(path: &Path, energy: &EnergyLedger) -> Result<(), OutputError> {
    let rows = energy
        .per_agent
        .iter()
        .enumerate()
        .map(|(i, e)| vec![i.to_string(), f6(*e)])
        .chain(std::iter::once(vec!["total".to_string(), f6(energy.swarm_total())]));
    write_rows(path, &ENERGY_HEADER, rows)
}

fn ensure_dir(dir: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError::Io { path: dir.to_path_buf(), source })
}

/// Writes positions, metrics and energy CSVs into `dir`.
pub fn emit_trace(out: &RunOutput, dir: &Path, paths: &OutputPaths) -> Result<(), OutputError> {
    ensure_dir(dir)?;
    write_positions(&dir.join(&paths.positions), &out.trace)?;
    write_metrics(&dir.join(&paths.metrics), &out.metrics)?;
    write_energy(&dir.join(&paths.energy), &out.energy)
}

pub fn write_config_echo(file: &ScenarioFile, path: &Path) -> Result<(), OutputError> {
    let text = config_echo(file)?;
    fs::write(path, text + "\n").map_err(|source| OutputError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k_left: usize,
    pub k_right: usize,
    /// Transit time of the forced split, `None` when it never completed.
    pub time_s: Option<f64>,
}

/// Forces every two-way split `(k, N - k)` on the first grouping event and
/// records its transit time. Splits run in parallel.
pub fn sweep_splits(scenario: &Scenario) -> Result<Vec<SweepRow>, EngineError> {
    let n = scenario.swarm.n_agents;
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let out = run_with_policy(scenario, &PlanPolicy::ForcedSplit(vec![k, n - k]))?;
            Ok(SweepRow { k_left: k, k_right: n - k, time_s: out.first_transit_time() })
        })
        .collect()
}

/// Row with the smallest time; ties go to the more balanced split, then to
/// the smaller `k_left`.
pub fn sweep_argmin(rows: &[SweepRow]) -> Option<&SweepRow> {
    rows.iter().filter(|r| r.time_s.is_some()).min_by(|a, b| {
        let imb = |r: &SweepRow| r.k_left * r.k_left + r.k_right * r.k_right;
        a.time_s
            .unwrap()
            .total_cmp(&b.time_s.unwrap())
            .then(imb(a).cmp(&imb(b)))
            .then(a.k_left.cmp(&b.k_left))
    })
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<(), OutputError> {
    write_rows(
        path,
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![r.k_left.to_string(), r.k_right.to_string(), r.time_s.map_or_else(|| INFEASIBLE.to_string(), f6)]
        }),
    )
}

/// Proposed and baseline runs of one scenario.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub proposed: RunOutput,
    pub baseline: RunOutput,
}

impl Comparison {
    /// Baseline over proposed full-mission energy, percent.
    pub fn energy_delta_pct(&self) -> Option<f64> {
        relative_delta(self.proposed.energy.swarm_total(), self.baseline.energy.swarm_total()).ok()
    }

    /// Same, counting only ticks while an avoidance manoeuvre is open.
    pub fn transit_energy_delta_pct(&self) -> Option<f64> {
        relative_delta(self.proposed.transit_energy.swarm_total(), self.baseline.transit_energy.swarm_total()).ok()
    }
}

pub fn compare_baseline(scenario: &Scenario) -> Result<Comparison, EngineError> {
    let (proposed, baseline) = rayon::join(|| run(scenario), || run_baseline(scenario));
    Ok(Comparison { proposed: proposed?, baseline: baseline? })
}

/// `metric,proposed,baseline,delta_pct` rows for energy and transit time.
pub fn write_comparison(path: &Path, c: &Comparison) -> Result<(), OutputError> {
    let opt = |x: Option<f64>| x.map_or_else(|| INFEASIBLE.to_string(), f6);
    let rows = vec![
        vec![
            "energy_J".to_string(),
            f6(c.proposed.energy.swarm_total()),
            f6(c.baseline.energy.swarm_total()),
            opt(c.energy_delta_pct()),
        ],
        vec![
            "transit_energy_J".to_string(),
            f6(c.proposed.transit_energy.swarm_total()),
            f6(c.baseline.transit_energy.swarm_total()),
            opt(c.transit_energy_delta_pct()),
        ],
        vec![
            "transit_time_s".to_string(),
            opt(c.proposed.first_transit_time()),
            opt(c.baseline.first_transit_time()),
            opt(match (c.proposed.first_transit_time(), c.baseline.first_transit_time()) {
                (Some(a), Some(b)) => relative_delta(a, b).ok(),
                _ => None,
            }),
        ],
    ];
    write_rows(path, &["metric", "proposed", "baseline", "delta_pct"], rows)
}

/// What an experiment produced, for reporting.
#[derive(Debug, Clone)]
pub enum ExperimentResult {
    Single(Box<RunOutput>),
    Sweep(Vec<SweepRow>),
    Compare(Box<Comparison>),
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

/// Runs the experiment in `mode` and writes its files plus the config echo
/// into `dir`. A comparison writes each run's trace into `proposed/` and
/// `baseline/` subdirectories.
pub fn run_experiment(file: &ScenarioFile, mode: Mode, dir: &Path) -> Result<ExperimentResult, ExperimentError> {
    let scenario = file.to_scenario()?;
    let paths = &file.experiment.outputs;
    ensure_dir(dir)?;
    write_config_echo(file, &dir.join(&paths.config_echo))?;
    let result = match mode {
        Mode::Single => {
            let out = run(&scenario)?;
            emit_trace(&out, dir, paths)?;
            ExperimentResult::Single(Box::new(out))
        }
        Mode::SweepSplits => {
            let rows = sweep_splits(&scenario)?;
            write_sweep(&dir.join(&paths.sweep), &rows)?;
            ExperimentResult::Sweep(rows)
        }
        Mode::CompareBaseline => {
            let c = compare_baseline(&scenario)?;
            emit_trace(&c.proposed, &dir.join("proposed"), paths)?;
            emit_trace(&c.baseline, &dir.join("baseline"), paths)?;
            write_comparison(&dir.join(&paths.comparison), &c)?;
            ExperimentResult::Compare(Box::new(c))
        }
    };
    Ok(result)
}

/// Default output directory for a scenario file: `out/<file stem>`.
pub fn default_out_dir(scenario_path: &Path) -> PathBuf {
    let stem = scenario_path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from("out").join(stem)
}
