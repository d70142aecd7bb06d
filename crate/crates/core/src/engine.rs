//! The per-tick phase machine that drives the swarm, and the metrics it
//! records.
//!
//! Internally everything runs in the swarm frame (start at the origin,
//! heading along `+y`); results are mapped back to world coordinates.
//! Obstacles are axis-aligned rectangles, so the formation heading must be
//! axis-aligned too.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::avoidance::{
    approach_point, build_routes, disturbance_command, merge_queue, plan_route, safe_command, DisturbanceParams, RouteSet,
    SeparationParams,
};
use crate::energy::{EnergyLedger, PowerModel};
use crate::error::{AvoidanceError, ConfigError, EngineError};
use crate::geometry::{AgentState, FormationSpec, GroupTag, Obstacle, Phase, SwarmConfig, Vec2};
use crate::grouping::{
    plan_group, population_factor, split_with_sizes, EvaluatedCandidate, GroupPlan, SplitCandidate, TransitPredictor,
};
use crate::kinematics::{step, KinematicLimits, MotionCommand};
use crate::reformation::{
    is_converged, next_swarm_location, reformation_tick, solve_assignment, AssignmentProblem, TrackingParams,
};

/// Proportional gain of slot tracking, 1/s.
const TRACKING_GAIN: f64 = 0.8;

/// Surrogate budget as a multiple of the unobstructed transit time.
const SURROGATE_BUDGET_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub swarm: SwarmConfig,
    pub obstacles: Vec<Obstacle>,
    pub power: PowerModel,
    /// Simulated seconds before a run is cut short. Defaults to three times
    /// the straight-line mission time plus one minute.
    pub time_budget: Option<f64>,
    /// Recorded with the results. The dynamics do not draw random numbers.
    pub seed: u64,
}

impl Scenario {
    pub fn new(swarm: SwarmConfig, obstacles: Vec<Obstacle>) -> Self {
        Self { swarm, obstacles, power: PowerModel::default(), time_budget: None, seed: 0 }
    }

    pub fn time_budget(&self) -> f64 {
        self.time_budget.unwrap_or_else(|| {
            3.0 * self.swarm.goal.distance(self.swarm.start) / self.swarm.nominal_speed + 60.0
        })
    }
}

/// How a group chooses its split when it meets an obstacle set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanPolicy {
    /// Score every split with a fast-forward simulation and take the quickest.
    Optimize,
    /// Use these group sizes (left to right) for the first event; later
    /// events are optimized.
    ForcedSplit(Vec<usize>),
    /// Every agent heads for the route whose entry point is nearest to it.
    NearestCorner,
}

/// Maps between world coordinates and the swarm frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    origin: Vec2,
    heading: Vec2,
}

impl Frame {
    pub fn new(origin: Vec2, heading: Vec2) -> Result<Self, ConfigError> {
        let h = heading
            .normalized()
            .ok_or_else(|| ConfigError::invalid("formation.heading", "must be a nonzero vector"))?;
        let heading = if h.x.abs() < 1e-12 {
            Vec2::new(0.0, h.y.signum())
        } else if h.y.abs() < 1e-12 {
            Vec2::new(h.x.signum(), 0.0)
        } else {
            return Err(ConfigError::invalid("formation.heading", "must be parallel to an axis"));
        };
        Ok(Self { origin, heading })
    }

    fn along_x(&self) -> bool {
        self.heading.y == 0.0
    }

    pub fn to_local(&self, p: Vec2) -> Vec2 {
        let d = p - self.origin;
        Vec2::new(d.dot(self.heading.perp_right()), d.dot(self.heading))
    }

    pub fn to_world(&self, p: Vec2) -> Vec2 {
        self.origin + self.vec_to_world(p)
    }

    pub fn vec_to_world(&self, v: Vec2) -> Vec2 {
        self.heading.perp_right() * v.x + self.heading * v.y
    }

    pub fn obstacle_to_local(&self, o: &Obstacle) -> Obstacle {
        let (half_width, half_depth) =
            if self.along_x() { (o.half_depth, o.half_width) } else { (o.half_width, o.half_depth) };
        Obstacle { id: o.id, center: self.to_local(o.center), half_width, half_depth }
    }
}

/// One split decision and what came of it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingEvent {
    /// Tick at which the obstacle set was detected.
    pub tick: u64,
    pub group: GroupTag,
    pub members: Vec<usize>,
    pub obstacle_ids: Vec<u32>,
    /// Route geometry in the swarm frame.
    pub routes: RouteSet,
    pub plan: GroupPlan,
    /// Every scored candidate; empty when the split was not optimized.
    pub evaluated: Vec<EvaluatedCandidate>,
    /// Tick at which the last member crossed the set's centre line.
    pub transit_end: Option<u64>,
}

impl GroupingEvent {
    pub fn transit_ticks(&self) -> Option<u64> {
        self.transit_end.map(|end| end - self.tick)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub tick: u64,
    pub time: f64,
    pub mean_speed: f64,
    pub std_speed: f64,
    pub mean_nn_dist: f64,
    pub std_nn_dist: f64,
    pub min_pair_dist: f64,
    /// Smallest agent-to-obstacle distance; infinite without obstacles.
    pub min_obstacle_clearance: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsSeries {
    pub rows: Vec<MetricsRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub tick: u64,
    pub time: f64,
    pub agent_id: usize,
    pub pos: Vec2,
    pub speed: f64,
    pub phase: Phase,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub tick: u64,
    pub time: f64,
    /// World frame.
    pub agents: Vec<AgentState>,
    pub phase: Phase,
    pub active_plan: Option<GroupPlan>,
    pub rng_seed: u64,
}

/// Snapshot taken whenever reformation completes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub tick: u64,
    pub max_slot_error: f64,
    pub mean_nn_dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub final_state: SimulationState,
    pub metrics: MetricsSeries,
    /// Whole mission.
    pub energy: EnergyLedger,
    /// Only ticks during which some group was still passing its obstacles.
    pub transit_energy: EnergyLedger,
    pub trace: Vec<TraceRow>,
    pub events: Vec<GroupingEvent>,
    /// `(tick, phase entered)`, starting with `(0, Formation)`.
    pub phase_log: Vec<(u64, Phase)>,
    pub convergences: Vec<ConvergenceRecord>,
    /// Final slot of each agent.
    pub slot_of: Vec<usize>,
    /// False when the time budget ran out before the goal was reached.
    pub complete: bool,
    pub dt: f64,
}

impl RunOutput {
    /// Transit time of the first grouping event, seconds.
    pub fn first_transit_time(&self) -> Option<f64> {
        self.events.first()?.transit_ticks().map(|t| t as f64 * self.dt)
    }
}

/// Proposed method: optimized group splitting.
pub fn run(scenario: &Scenario) -> Result<RunOutput, EngineError> {
    run_with_policy(scenario, &PlanPolicy::Optimize)
}

/// Shortest-path baseline: every agent takes its nearest corner.
pub fn run_baseline(scenario: &Scenario) -> Result<RunOutput, EngineError> {
    run_with_policy(scenario, &PlanPolicy::NearestCorner)
}

pub fn run_with_policy(scenario: &Scenario, policy: &PlanPolicy) -> Result<RunOutput, EngineError> {
    scenario.swarm.validate()?;
    let budget = scenario.time_budget();
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(ConfigError::invalid("experiment.time_budget", "must be positive").into());
    }
    let frame = Frame::new(scenario.swarm.start, scenario.swarm.formation.heading())?;
    let mut sim = Sim::new(&scenario.swarm, &scenario.obstacles, &frame)?;
    let n = sim.agents.len();
    let dt = sim.cfg.dt;
    let max_ticks = (budget / dt).ceil() as u64;

    let mut out = RunOutput {
        final_state: SimulationState {
            tick: 0,
            time: 0.0,
            agents: Vec::new(),
            phase: Phase::Formation,
            active_plan: None,
            rng_seed: scenario.seed,
        },
        metrics: MetricsSeries::default(),
        energy: EnergyLedger::new(n, 0.0),
        transit_energy: EnergyLedger::new(n, 0.0),
        trace: Vec::new(),
        events: Vec::new(),
        phase_log: vec![(0, Phase::Formation)],
        convergences: Vec::new(),
        slot_of: Vec::new(),
        complete: false,
        dt,
    };

    while sim.tick < max_ticks {
        sim.detect_events(policy, &mut out.events)?;
        log_phase(&mut out.phase_log, sim.tick, sim.phase);

        let speeds: Vec<f64> = sim.agents.iter().map(AgentState::speed).collect();
        out.energy.accumulate(&speeds, &scenario.power, dt);
        if out.events.iter().any(|e| e.transit_end.is_none()) {
            if out.transit_energy.duration() == 0.0 {
                out.transit_energy.t_start = sim.tick as f64 * dt;
                out.transit_energy.t_end = out.transit_energy.t_start;
            }
            out.transit_energy.accumulate(&speeds, &scenario.power, dt);
        }

        if sim.phase == Phase::Convergence {
            sim.reassign_slots()?;
        }
        sim.step_dynamics();

        match sim.phase {
            Phase::Disturbance if sim.waypoints.iter().all(VecDeque::is_empty) => sim.begin_convergence()?,
            Phase::Convergence if sim.converged() => {
                out.convergences.push(sim.convergence_record());
                sim.finish_convergence();
            }
            _ => {}
        }
        for a in &mut sim.agents {
            a.phase = sim.phase;
        }
        log_phase(&mut out.phase_log, sim.tick, sim.phase);

        for e in out.events.iter_mut().filter(|e| e.transit_end.is_none()) {
            if sim.all_past(&e.members, e.routes.center_line) {
                e.transit_end = Some(sim.tick);
            }
        }

        let time = sim.tick as f64 * dt;
        let mut row = metrics_tick(&sim.agents);
        row.tick = sim.tick;
        row.time = time;
        row.phase = sim.phase;
        row.min_obstacle_clearance = sim.min_obstacle_clearance();
        out.metrics.rows.push(row);
        for a in &sim.agents {
            out.trace.push(TraceRow {
                tick: sim.tick,
                time,
                agent_id: a.id,
                pos: frame.to_world(a.pos),
                speed: a.speed(),
                phase: sim.phase,
                group: a.group.clone().unwrap_or_else(GroupTag::root).to_string(),
            });
        }

        if sim.phase != Phase::Disturbance && sim.at_goal() {
            out.complete = true;
            break;
        }
    }

    out.slot_of = sim.slot_of.clone();
    out.final_state = SimulationState {
        tick: sim.tick,
        time: sim.tick as f64 * dt,
        agents: sim
            .agents
            .iter()
            .map(|a| AgentState { pos: frame.to_world(a.pos), vel: frame.vec_to_world(a.vel), ..a.clone() })
            .collect(),
        phase: sim.phase,
        active_plan: sim.active_plan.clone(),
        rng_seed: scenario.seed,
    };
    Ok(out)
}

fn log_phase(log: &mut Vec<(u64, Phase)>, tick: u64, phase: Phase) {
    if log.last().map(|l| l.1) != Some(phase) {
        log.push((tick, phase));
    }
}

/// Speed and spacing statistics for one tick. `tick`, `time`, `phase` and
/// `min_obstacle_clearance` are left for the caller to fill in.
///
/// With a single agent the spacing figures are zero.
pub fn metrics_tick(agents: &[AgentState]) -> MetricsRow {
    let (mean_speed, std_speed) = mean_std(agents.iter().map(AgentState::speed));
    let n = agents.len();
    let mut nn = vec![f64::INFINITY; n];
    let mut min_pair = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = agents[i].pos.distance(agents[j].pos);
            nn[i] = nn[i].min(d);
            nn[j] = nn[j].min(d);
            min_pair = min_pair.min(d);
        }
    }
    let (mean_nn, std_nn) = if n < 2 { (0.0, 0.0) } else { mean_std(nn.into_iter()) };
    MetricsRow {
        tick: 0,
        time: 0.0,
        mean_speed,
        std_speed,
        mean_nn_dist: mean_nn,
        std_nn_dist: std_nn,
        min_pair_dist: if n < 2 { 0.0 } else { min_pair },
        min_obstacle_clearance: f64::INFINITY,
        phase: Phase::Formation,
    }
}

/// Population mean and standard deviation.
fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Mutable simulation state in the swarm frame. Cloned wholesale for the
/// fast-forward transit predictions.
#[derive(Debug, Clone)]
struct Sim {
    cfg: SwarmConfig,
    obstacles: Vec<Obstacle>,
    tick: u64,
    agents: Vec<AgentState>,
    waypoints: Vec<VecDeque<Vec2>>,
    phase: Phase,
    anchor: Vec2,
    slot_of: Vec<usize>,
    handled: BTreeMap<GroupTag, BTreeSet<u32>>,
    active_plan: Option<GroupPlan>,
}

impl Sim {
    fn new(world: &SwarmConfig, obstacles: &[Obstacle], frame: &Frame) -> Result<Self, ConfigError> {
        let formation = FormationSpec::new(
            world.formation.slots().to_vec(),
            Vec2::UNIT_Y,
            world.formation.inter_agent_distance(),
        )?;
        let cfg = SwarmConfig {
            formation,
            start: Vec2::ZERO,
            goal: frame.to_local(world.goal),
            ..world.clone()
        };
        let agents = (0..cfg.n_agents)
            .map(|i| AgentState {
                id: i,
                pos: cfg.formation.slot_position(Vec2::ZERO, i),
                vel: Vec2::UNIT_Y * cfg.nominal_speed,
                nominal_speed: cfg.nominal_speed,
                speed_margin: cfg.speed_margin,
                group: Some(GroupTag::root()),
                is_leader: i == 0,
                phase: Phase::Formation,
            })
            .collect();
        let n = cfg.n_agents;
        let mut sim = Self {
            obstacles: obstacles.iter().map(|o| frame.obstacle_to_local(o)).collect(),
            tick: 0,
            agents,
            waypoints: vec![VecDeque::new(); n],
            phase: Phase::Formation,
            anchor: Vec2::ZERO,
            slot_of: (0..n).collect(),
            handled: BTreeMap::new(),
            active_plan: None,
            cfg,
        };
        sim.renominate_root_leader();
        Ok(sim)
    }

    fn limits(&self) -> KinematicLimits {
        KinematicLimits {
            max_accel: self.cfg.max_accel,
            max_turn_rate: self.cfg.max_turn_rate,
            speed_cap: self.cfg.speed_cap,
        }
    }

    fn separation(&self) -> SeparationParams {
        SeparationParams { dist_safe: self.cfg.dist_safe, dt: self.cfg.dt, limits: self.limits() }
    }

    fn anchor_velocity(&self) -> Vec2 {
        let to_goal = self.cfg.goal - self.anchor;
        let d = to_goal.norm();
        match to_goal.normalized() {
            Some(dir) if d > 1e-12 => dir * self.cfg.nominal_speed.min(d / self.cfg.dt),
            _ => Vec2::ZERO,
        }
    }

    fn slot_targets(&self) -> Vec<Vec2> {
        (0..self.cfg.formation.len())
            .map(|i| self.cfg.formation.slot_position(self.anchor, i))
            .collect()
    }

    fn tracking(&self) -> TrackingParams {
        let eps = self.cfg.convergence_tolerance;
        TrackingParams {
            gain: TRACKING_GAIN,
            tolerance: eps,
            spacing_tolerance: 2.0 * eps,
            speed_cap: self.cfg.speed_cap,
            heading: Vec2::UNIT_Y,
        }
    }

    /// Moves every agent one tick. Agents choose in precedence order; each
    /// command is filtered against the committed states of the agents ahead
    /// of it and the full-braking states of the ones not yet moved.
    fn step_dynamics(&mut self) {
        let limits = self.limits();
        let sep = self.separation();
        let dt = self.cfg.dt;
        let n = self.agents.len();

        let braking: Vec<AgentState> = self
            .agents
            .iter()
            .map(|a| {
                let heading = a.vel.normalized().unwrap_or(Vec2::UNIT_Y);
                step(a, &MotionCommand { heading, speed: 0.0 }, dt, &limits)
            })
            .collect();

        let anchor_velocity = self.anchor_velocity();
        let desired: Vec<MotionCommand> = match self.phase {
            Phase::Disturbance => Vec::new(),
            _ => {
                let targets = self.slot_targets();
                reformation_tick(&self.agents, &self.slot_of, &targets, anchor_velocity, &self.tracking()).0
            }
        };
        let disturbance = DisturbanceParams {
            separation: sep,
            heading: Vec2::UNIT_Y,
            g: self.cfg.g,
            c_d: self.cfg.c_d,
            t_c: self.cfg.t_c,
            danger_margin: self.cfg.danger_margin,
        };

        let mut next: Vec<Option<AgentState>> = vec![None; n];
        for id in merge_queue(&self.agents, Vec2::UNIT_Y) {
            let agent = &self.agents[id];
            let neighbors: Vec<&AgentState> = (0..n)
                .filter(|&j| j != id)
                .map(|j| next[j].as_ref().unwrap_or(&braking[j]))
                .collect();
            let cmd = match self.phase {
                Phase::Disturbance => disturbance_command(
                    agent,
                    self.waypoints[id].front().copied(),
                    &neighbors,
                    &self.obstacles,
                    &disturbance,
                ),
                _ => safe_command(agent, desired[id], &neighbors, &self.obstacles, &sep),
            };
            next[id] = Some(step(agent, &cmd, dt, &limits));
        }
        self.agents = next.into_iter().map(|a| a.expect("every agent moved")).collect();

        if self.phase != Phase::Disturbance {
            self.anchor += anchor_velocity * dt;
        }
        for (agent, queue) in self.agents.iter().zip(&mut self.waypoints) {
            while queue.front().is_some_and(|w| agent.pos.y >= w.y) {
                queue.pop_front();
            }
        }
        self.tick += 1;
    }

    /// Whether the agent's intended path (remaining waypoints, then straight
    /// on for one detection range) passes closer than `dist_safe`.
    fn path_conflicts(&self, id: usize, o: &Obstacle) -> bool {
        let mut from = self.agents[id].pos;
        for &w in &self.waypoints[id] {
            if o.segment_distance(from, w) < self.cfg.dist_safe {
                return true;
            }
            from = w;
        }
        let end = from + Vec2::UNIT_Y * self.cfg.detection_range;
        o.segment_distance(from, end) < self.cfg.dist_safe
    }

    fn groups(&self) -> BTreeMap<GroupTag, Vec<usize>> {
        let mut groups: BTreeMap<GroupTag, Vec<usize>> = BTreeMap::new();
        for a in &self.agents {
            groups.entry(a.group.clone().unwrap_or_else(GroupTag::root)).or_default().push(a.id);
        }
        groups
    }

    /// Checks every group for newly detected obstacles in its way and splits
    /// the group over the routes around them. Groups are handled in tag
    /// order; each sees the plans of the groups before it.
    fn detect_events(&mut self, policy: &PlanPolicy, events: &mut Vec<GroupingEvent>) -> Result<(), EngineError> {
        for (tag, members) in self.groups() {
            let handled = self.handled.get(&tag).cloned().unwrap_or_default();
            let in_range: Vec<&Obstacle> = self
                .obstacles
                .iter()
                .filter(|o| !handled.contains(&o.id))
                .filter(|o| members.iter().any(|&m| o.distance_to(self.agents[m].pos) <= self.cfg.detection_range))
                .collect();
            let relevant: Vec<&Obstacle> = in_range
                .iter()
                .copied()
                .filter(|o| members.iter().any(|&m| self.path_conflicts(m, o)))
                .collect();
            if relevant.is_empty() {
                continue;
            }
            // Obstacles abreast of the ones in the way are passed as one set.
            let lo = relevant.iter().map(|o| o.min_y()).fold(f64::INFINITY, f64::min);
            let hi = relevant.iter().map(|o| o.max_y()).fold(f64::NEG_INFINITY, f64::max);
            let set: Vec<Obstacle> = in_range
                .into_iter()
                .filter(|o| o.min_y() <= hi && o.max_y() >= lo)
                .copied()
                .collect();
            let routes = build_routes(&set, self.cfg.dist_safe);
            let n_routes = population_factor(routes.blocks.len());
            let ids: Vec<u32> = set.iter().map(|o| o.id).collect();
            let member_states: Vec<AgentState> = members.iter().map(|&m| self.agents[m].clone()).collect();

            let policy = match policy {
                PlanPolicy::ForcedSplit(_) if !events.is_empty() => &PlanPolicy::Optimize,
                p => p,
            };
            let (plan, evaluated) = match policy {
                PlanPolicy::Optimize => {
                    let predictor = Surrogate::new(self, &tag, &members, &routes, &ids);
                    plan_group(&tag, &member_states, n_routes, Vec2::UNIT_Y, &predictor)?
                }
                PlanPolicy::ForcedSplit(sizes) => {
                    if sizes.len() != n_routes || sizes.iter().sum::<usize>() != members.len() {
                        return Err(EngineError::BadForcedSplit {
                            sizes: sizes.clone(),
                            routes: n_routes,
                            agents: members.len(),
                        });
                    }
                    let c = split_with_sizes(&member_states, sizes, Vec2::UNIT_Y);
                    let plan =
                        GroupPlan::from_assignment(&tag, &c.assignment, n_routes, f64::NAN, &member_states, Vec2::UNIT_Y);
                    (plan, Vec::new())
                }
                PlanPolicy::NearestCorner => {
                    let assignment: Vec<(usize, usize)> =
                        members.iter().map(|&m| (m, self.nearest_route(m, &routes))).collect();
                    let plan =
                        GroupPlan::from_assignment(&tag, &assignment, n_routes, f64::NAN, &member_states, Vec2::UNIT_Y);
                    (plan, Vec::new())
                }
            };
            self.apply_plan(&plan, &routes, &ids)?;
            let transit_end = self.all_past(&members, routes.center_line).then_some(self.tick);
            events.push(GroupingEvent {
                tick: self.tick,
                group: tag,
                members,
                obstacle_ids: ids,
                routes,
                plan,
                evaluated,
                transit_end,
            });
        }
        Ok(())
    }

    /// Route whose entry waypoint is closest; ties to the leftmost.
    fn nearest_route(&self, id: usize, routes: &RouteSet) -> usize {
        let pos = self.agents[id].pos;
        let from = self.waypoints[id].back().copied().unwrap_or(pos);
        let mut best = (f64::INFINITY, 0);
        for (r, route) in routes.routes.iter().enumerate() {
            let Ok(points) = plan_route(from, route, self.cfg.lane_clearance(), self.cfg.dist_safe) else { continue };
            let d = points.first().map_or(0.0, |p| p.distance(from));
            if d < best.0 {
                best = (d, r);
            }
        }
        best.1
    }

    fn apply_plan(&mut self, plan: &GroupPlan, routes: &RouteSet, ids: &[u32]) -> Result<(), AvoidanceError> {
        let mut handled = self.handled.get(&plan.parent).cloned().unwrap_or_default();
        handled.extend(ids.iter().copied());
        for (&id, tag) in &plan.partition {
            let route = &routes.routes[plan.routes[tag]];
            let from = self.waypoints[id].back().copied().unwrap_or(self.agents[id].pos);
            let points = plan_route(from, route, self.cfg.lane_clearance(), self.cfg.dist_safe)?;
            let lead = self.cfg.approach_lead;
            if lead > 0.0 {
                let entry = approach_point(route, self.cfg.lane_clearance(), lead);
                if entry.y > from.y {
                    self.waypoints[id].push_back(entry);
                }
            }
            self.waypoints[id].extend(points);
            self.agents[id].group = Some(tag.clone());
            self.agents[id].is_leader = plan.leaders.get(tag) == Some(&id);
            self.handled.insert(tag.clone(), handled.clone());
        }
        self.phase = Phase::Disturbance;
        self.active_plan = Some(plan.clone());
        Ok(())
    }

    fn all_past(&self, members: &[usize], line: f64) -> bool {
        members.iter().all(|&m| self.agents[m].pos.y >= line)
    }

    fn begin_convergence(&mut self) -> Result<(), EngineError> {
        let positions: Vec<Vec2> = self.agents.iter().map(|a| a.pos).collect();
        let (anchor, targets) = next_swarm_location(&positions, self.cfg.goal, &self.cfg.formation, self.cfg.lookahead);
        let assignment = solve_assignment(&AssignmentProblem::new(positions, targets)?)?;
        self.anchor = anchor;
        self.slot_of = assignment.mapping;
        self.phase = Phase::Convergence;
        Ok(())
    }

    /// Re-solves the slot assignment for the current anchor so that
    /// stragglers take the free slots nearest to them.
    fn reassign_slots(&mut self) -> Result<(), EngineError> {
        let positions: Vec<Vec2> = self.agents.iter().map(|a| a.pos).collect();
        let assignment = solve_assignment(&AssignmentProblem::new(positions, self.slot_targets())?)?;
        self.slot_of = assignment.mapping;
        Ok(())
    }

    fn converged(&self) -> bool {
        is_converged(&self.agents, &self.slot_of, &self.slot_targets(), &self.tracking())
    }

    fn convergence_record(&self) -> ConvergenceRecord {
        let targets = self.slot_targets();
        let max_slot_error = self
            .agents
            .iter()
            .map(|a| a.pos.distance(targets[self.slot_of[a.id]]))
            .fold(0.0, f64::max);
        ConvergenceRecord { tick: self.tick, max_slot_error, mean_nn_dist: metrics_tick(&self.agents).mean_nn_dist }
    }

    /// Back to one group holding the formation.
    fn finish_convergence(&mut self) {
        let handled: BTreeSet<u32> = self.handled.values().flatten().copied().collect();
        self.handled.clear();
        self.handled.insert(GroupTag::root(), handled);
        for a in &mut self.agents {
            a.group = Some(GroupTag::root());
        }
        self.active_plan = None;
        self.renominate_root_leader();
        self.phase = Phase::Formation;
    }

    fn renominate_root_leader(&mut self) {
        let lead = self
            .agents
            .iter()
            .max_by(|a, b| a.pos.y.total_cmp(&b.pos.y).then(b.id.cmp(&a.id)))
            .map(|a| a.id);
        for a in &mut self.agents {
            a.is_leader = Some(a.id) == lead;
        }
    }

    fn at_goal(&self) -> bool {
        let radius = self.cfg.formation.inter_agent_distance();
        self.agents
            .iter()
            .all(|a| a.pos.distance(self.cfg.formation.slot_position(self.cfg.goal, self.slot_of[a.id])) <= radius)
    }

    fn min_obstacle_clearance(&self) -> f64 {
        self.agents
            .iter()
            .flat_map(|a| self.obstacles.iter().map(move |o| o.distance_to(a.pos)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Scores a split by cloning the simulation, applying the split and running
/// the same dynamics, without event detection, until every member of the
/// group has crossed the centre line.
struct Surrogate<'a> {
    base: &'a Sim,
    parent: &'a GroupTag,
    members: &'a [usize],
    member_states: Vec<AgentState>,
    routes: &'a RouteSet,
    ids: &'a [u32],
    budget: u64,
}

impl<'a> Surrogate<'a> {
    fn new(base: &'a Sim, parent: &'a GroupTag, members: &'a [usize], routes: &'a RouteSet, ids: &'a [u32]) -> Self {
        let free_time = members
            .iter()
            .map(|&m| (routes.center_line - base.agents[m].pos.y).max(0.0) / base.cfg.nominal_speed)
            .fold(0.0, f64::max);
        let budget = (SURROGATE_BUDGET_FACTOR * free_time / base.cfg.dt).ceil() as u64 + 50;
        Self {
            base,
            parent,
            members,
            member_states: members.iter().map(|&m| base.agents[m].clone()).collect(),
            routes,
            ids,
            budget,
        }
    }
}

impl TransitPredictor for Surrogate<'_> {
    fn transit_ticks(&self, candidate: &SplitCandidate) -> Option<u64> {
        let mut sim = self.base.clone();
        let plan = GroupPlan::from_assignment(
            self.parent,
            &candidate.assignment,
            candidate.sizes.len(),
            f64::NAN,
            &self.member_states,
            Vec2::UNIT_Y,
        );
        sim.apply_plan(&plan, self.routes, self.ids).ok()?;
        let line = self.routes.center_line;
        if sim.all_past(self.members, line) {
            return Some(0);
        }
        for k in 1..=self.budget {
            sim.step_dynamics();
            if sim.all_past(self.members, line) {
                return Some(k);
            }
        }
        None
    }

    fn dt(&self) -> f64 {
        self.base.cfg.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(id: usize, x: f64, y: f64, speed: f64) -> AgentState {
        AgentState {
            id,
            pos: Vec2::new(x, y),
            vel: Vec2::new(0.0, speed),
            nominal_speed: 10.0,
            speed_margin: 2.0,
            group: None,
            is_leader: false,
            phase: Phase::Formation,
        }
    }

    #[test]
    fn metrics_examples() {
        let row = metrics_tick(&[agent(0, 0.0, 0.0, 10.0), agent(1, 4.0, 0.0, 10.0)]);
        assert_eq!(row.mean_speed, 10.0);
        assert_eq!(row.std_speed, 0.0);
        assert_eq!(row.mean_nn_dist, 4.0);
        assert_eq!(row.min_pair_dist, 4.0);

        let f = FormationSpec::nested_v(8, 4.0, Vec2::UNIT_Y).unwrap();
        let agents: Vec<_> = (0..8).map(|i| {
            let p = f.slot_position(Vec2::ZERO, i);
            agent(i, p.x, p.y, 10.0)
        }).collect();
        let row = metrics_tick(&agents);
        assert!((row.mean_nn_dist - 4.0).abs() < 1e-9);
        assert!(row.std_nn_dist < 1e-9);
    }

    #[test]
    fn frame_round_trip() {
        for heading in [Vec2::UNIT_Y, Vec2::new(1.0, 0.0), Vec2::new(0.0, -2.0), Vec2::new(-1.0, 0.0)] {
            let f = Frame::new(Vec2::new(3.0, -7.0), heading).unwrap();
            let p = Vec2::new(12.5, 4.25);
            assert_eq!(f.to_world(f.to_local(p)), p);
            let o = Obstacle::new(1, p, 3.0, 1.0).unwrap();
            let l = f.obstacle_to_local(&o);
            assert_eq!(l.half_width * l.half_depth, 3.0);
        }
        assert!(Frame::new(Vec2::ZERO, Vec2::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn heading_ahead_is_plus_y() {
        let f = Frame::new(Vec2::ZERO, Vec2::new(1.0, 0.0)).unwrap();
        assert_eq!(f.to_local(Vec2::new(5.0, 0.0)), Vec2::new(0.0, 5.0));
        // Heading +x, the right-hand side is -y.
        assert_eq!(f.to_local(Vec2::new(0.0, -2.0)), Vec2::new(2.0, 0.0));
    }
}
