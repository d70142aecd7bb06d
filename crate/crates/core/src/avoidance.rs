//! Gap evaluation, obstacle enveloping, lane waypoints, queue ordering and
//! the speed control that keeps agents apart.
//!
//! Geometry here is expressed in the swarm frame: the swarm travels along
//! `+y` and `+x` is to its right.

use std::collections::BTreeMap;

use crate::error::AvoidanceError;
use crate::geometry::{AgentState, Obstacle, Vec2};
use crate::kinematics::{self, KinematicLimits, MotionCommand};
use crate::sensing;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvoidanceMode {
    SingleObstacle,
    GapTransit,
    Enveloped,
}

/// Minimum boundary-to-boundary distance; zero when the rectangles overlap.
pub fn gap_between(a: &Obstacle, b: &Obstacle) -> f64 {
    let dx = (a.min_x() - b.max_x()).max(b.min_x() - a.max_x()).max(0.0);
    let dy = (a.min_y() - b.max_y()).max(b.min_y() - a.max_y()).max(0.0);
    dx.hypot(dy)
}

/// A gap is flown through only when strictly wider than `dist_safe`.
pub fn choose_mode(gap: f64, dist_safe: f64) -> AvoidanceMode {
    if gap > dist_safe {
        AvoidanceMode::GapTransit
    } else {
        AvoidanceMode::Enveloped
    }
}

/// Merges laterally adjacent obstacles that leave no usable gap, returning
/// blocks sorted left to right.
pub fn envelope_obstacles(obstacles: &[Obstacle], dist_safe: f64) -> Vec<Obstacle> {
    let mut blocks: Vec<Obstacle> = obstacles.to_vec();
    blocks.sort_by(|a, b| a.min_x().total_cmp(&b.min_x()).then(a.id.cmp(&b.id)));
    loop {
        let mut merged = false;
        let mut out: Vec<Obstacle> = Vec::with_capacity(blocks.len());
        for b in blocks {
            if let Some(last) = out.last_mut() {
                let overlapping = b.min_x() <= last.max_x();
                if overlapping || choose_mode(gap_between(last, &b), dist_safe) == AvoidanceMode::Enveloped {
                    *last = last.bounding_union(&b);
                    merged = true;
                    continue;
                }
            }
            out.push(b);
        }
        blocks = out;
        if !merged {
            return blocks;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Route {
    /// Around the left edge of the whole set.
    Left { front: f64, back: f64, edge_x: f64 },
    /// Between two neighbouring blocks.
    Gap { front: f64, back: f64, left_x: f64, right_x: f64 },
    /// Around the right edge of the whole set.
    Right { front: f64, back: f64, edge_x: f64 },
}

impl Route {
    pub fn width(&self) -> f64 {
        match *self {
            Route::Gap { left_x, right_x, .. } => right_x - left_x,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSet {
    pub mode: AvoidanceMode,
    pub blocks: Vec<Obstacle>,
    /// Left to right; `blocks.len() + 1` entries.
    pub routes: Vec<Route>,
    /// Along-track coordinate of the set's centre.
    pub center_line: f64,
}

/// Routes around `obstacles` after merging the ones too close together.
pub fn build_routes(obstacles: &[Obstacle], dist_safe: f64) -> RouteSet {
    let blocks = envelope_obstacles(obstacles, dist_safe);
    let front = blocks.iter().map(Obstacle::min_y).fold(f64::INFINITY, f64::min);
    let back = blocks.iter().map(Obstacle::max_y).fold(f64::NEG_INFINITY, f64::max);
    let mode = if obstacles.len() <= 1 {
        AvoidanceMode::SingleObstacle
    } else if blocks.len() > 1 {
        AvoidanceMode::GapTransit
    } else {
        AvoidanceMode::Enveloped
    };
    let mut routes = vec![Route::Left { front, back, edge_x: blocks[0].min_x() }];
    for pair in blocks.windows(2) {
        routes.push(Route::Gap {
            front: pair[0].min_y().min(pair[1].min_y()),
            back: pair[0].max_y().max(pair[1].max_y()),
            left_x: pair[0].max_x(),
            right_x: pair[1].min_x(),
        });
    }
    routes.push(Route::Right { front, back, edge_x: blocks[blocks.len() - 1].max_x() });
    RouteSet { mode, blocks, routes, center_line: 0.5 * (front + back) }
}

/// Waypoints for one agent taking `route`.
///
/// Corner lanes run `clearance` outside the edge from the front face to
/// `clearance` beyond the back face. Gap lanes follow the centreline from
/// `clearance` before the front to `clearance` past the back. Waypoints
/// already behind `from` are dropped.
pub fn plan_route(from: Vec2, route: &Route, clearance: f64, dist_safe: f64) -> Result<Vec<Vec2>, AvoidanceError> {
    let points = match *route {
        Route::Left { front, back, edge_x } => {
            let x = edge_x - clearance;
            vec![Vec2::new(x, front), Vec2::new(x, back + clearance)]
        }
        Route::Right { front, back, edge_x } => {
            let x = edge_x + clearance;
            vec![Vec2::new(x, front), Vec2::new(x, back + clearance)]
        }
        Route::Gap { front, back, left_x, right_x } => {
            let width = right_x - left_x;
            if width < 2.0 * dist_safe {
                return Err(AvoidanceError::GapTooNarrow { gap: width, required: 2.0 * dist_safe });
            }
            let x = 0.5 * (left_x + right_x);
            vec![
                Vec2::new(x, front - clearance),
                Vec2::new(x, 0.5 * (front + back)),
                Vec2::new(x, back + clearance),
            ]
        }
    };
    Ok(points.into_iter().skip_while(|p| p.y <= from.y).collect())
}

/// Alignment point on the route's lane, `lead` before the obstacle front.
/// Lining up here lets agents merge into single file before the corner.
pub fn approach_point(route: &Route, clearance: f64, lead: f64) -> Vec2 {
    match *route {
        Route::Left { front, edge_x, .. } => Vec2::new(edge_x - clearance, front - lead),
        Route::Right { front, edge_x, .. } => Vec2::new(edge_x + clearance, front - lead),
        Route::Gap { front, left_x, right_x, .. } => Vec2::new(0.5 * (left_x + right_x), front - clearance - lead),
    }
}

/// Agents ordered by precedence: furthest ahead first, ties to the lower id.
pub fn merge_queue(agents: &[AgentState], heading: Vec2) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..agents.len()).collect();
    idx.sort_by(|&a, &b| {
        agents[b]
            .pos
            .dot(heading)
            .total_cmp(&agents[a].pos.dot(heading))
            .then(agents[a].id.cmp(&agents[b].id))
    });
    idx.into_iter().map(|i| agents[i].id).collect()
}

/// Per-tick route bookkeeping produced when a plan is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct AvoidancePlan {
    pub mode: AvoidanceMode,
    pub waypoints: BTreeMap<usize, Vec<Vec2>>,
    pub queue_order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationParams {
    pub dist_safe: f64,
    pub dt: f64,
    pub limits: KinematicLimits,
}

/// Whether two agents, each braking at the acceleration limit along its
/// current velocity from the given states, stay at least `dist_safe` apart.
/// The states are post-step: positions for the next tick are fixed, the
/// velocities are the ones just chosen.
pub fn braking_safe(a: &AgentState, b: &AgentState, params: &SeparationParams) -> bool {
    min_braking_distance(a, b, params) >= params.dist_safe - 1e-9
}

/// Smallest distance over the joint braking manoeuvre, excluding the fixed
/// next-tick positions.
pub fn min_braking_distance(a: &AgentState, b: &AgentState, params: &SeparationParams) -> f64 {
    let dv = params.limits.max_accel * params.dt;
    let (mut pa, mut pb) = (a.pos, b.pos);
    let (mut sa, mut sb) = (a.speed(), b.speed());
    let ha = a.vel.normalized().unwrap_or(Vec2::ZERO);
    let hb = b.vel.normalized().unwrap_or(Vec2::ZERO);

    let reach = |s: f64| s * params.dt + s * s / (2.0 * params.limits.max_accel) + s * params.dt;
    let gap = pa.distance(pb);
    if gap - reach(sa) - reach(sb) > params.dist_safe + 1.0 {
        return gap;
    }

    let mut best = f64::INFINITY;
    while sa > 0.0 || sb > 0.0 {
        pa += ha * (sa * params.dt);
        pb += hb * (sb * params.dt);
        sa = (sa - dv).max(0.0);
        sb = (sb - dv).max(0.0);
        best = best.min(pa.distance(pb));
    }
    best.min(pa.distance(pb))
}

/// Whether braking at the acceleration limit from the post-step state
/// `next` keeps the agent at least `dist_safe` from every obstacle.
pub fn braking_clear_of_obstacles(next: &AgentState, obstacles: &[Obstacle], params: &SeparationParams) -> bool {
    if obstacles.is_empty() {
        return true;
    }
    let dv = params.limits.max_accel * params.dt;
    let mut s = next.speed();
    let Some(h) = next.vel.normalized() else { return true };
    let reach = s * params.dt + s * s / (2.0 * params.limits.max_accel) + s * params.dt;
    let mut p = next.pos;
    let near: Vec<&Obstacle> = obstacles
        .iter()
        .filter(|o| o.distance_to(p) < reach + params.dist_safe + 1.0)
        .collect();
    while s > 0.0 && !near.is_empty() {
        let q = p + h * (s * params.dt);
        if near.iter().any(|o| o.segment_distance(p, q) < params.dist_safe - 1e-9) {
            return false;
        }
        p = q;
        s = (s - dv).max(0.0);
    }
    true
}

/// Picks the fastest speed, no faster than `cmd.speed`, whose resulting
/// state is braking-safe against every neighbour and obstacle. Neighbours
/// are post-step states. Falls back to the current heading and finally to
/// full braking; a stopped agent first tries headings deflected by up to 90
/// degrees.
pub fn safe_command(
    agent: &AgentState,
    cmd: MotionCommand,
    neighbors: &[&AgentState],
    obstacles: &[Obstacle],
    params: &SeparationParams,
) -> MotionCommand {
    let speed = agent.speed();
    let dv = params.limits.max_accel * params.dt;
    let reachable_max = cmd.speed.min(speed + dv);
    let floor = (speed - dv).max(0.0);
    let top = reachable_max.max(floor);

    let is_safe = |c: &MotionCommand| {
        let next = kinematics::step(agent, c, params.dt, &params.limits);
        neighbors.iter().all(|n| braking_safe(&next, n, params)) && braking_clear_of_obstacles(&next, obstacles, params)
    };

    const LEVELS: usize = 8;
    let current_heading = agent.vel.normalized().unwrap_or(cmd.heading);
    // A stopped agent may set off in any direction, so it also tries
    // deflections of growing size to either side before staying put.
    let stopped = floor == 0.0;
    let mut headings = vec![cmd.heading];
    if stopped {
        for k in 1..=6 {
            let a = k as f64 * std::f64::consts::PI / 12.0;
            headings.extend([cmd.heading.rotated(a), cmd.heading.rotated(-a)]);
        }
    }
    headings.push(current_heading);
    for heading in headings {
        for i in 0..=LEVELS {
            let s = top - (top - floor) * i as f64 / LEVELS as f64;
            if stopped && i == LEVELS {
                continue;
            }
            let candidate = MotionCommand { heading, speed: if i == 0 { cmd.speed } else { s } };
            if is_safe(&candidate) {
                // Braking as hard as allowed is the same as commanding a stop.
                let speed = if i > 0 && s <= floor + 1e-12 { 0.0 } else { candidate.speed };
                return MotionCommand { heading, speed };
            }
        }
    }
    MotionCommand { heading: current_heading, speed: 0.0 }
}

/// Context for commands during the disturbance phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceParams {
    pub separation: SeparationParams,
    pub heading: Vec2,
    pub g: f64,
    pub c_d: f64,
    pub t_c: f64,
    pub danger_margin: f64,
}

/// Heads for `waypoint` (or straight on) at cruise speed, slowing to the
/// bottom of the speed band when the velocity points into an obstacle inside
/// the danger zone, and further as needed to keep clear of `neighbors`.
pub fn disturbance_command(
    agent: &AgentState,
    waypoint: Option<Vec2>,
    neighbors: &[&AgentState],
    obstacles: &[Obstacle],
    params: &DisturbanceParams,
) -> MotionCommand {
    let heading = waypoint
        .and_then(|w| (w - agent.pos).normalized())
        .unwrap_or(params.heading);
    let mut desired = agent.nominal_speed;
    if let Some(dir) = agent.vel.normalized() {
        let zone = sensing::stopping_distance(agent.speed(), params.g, params.c_d, params.t_c)
            .map(|s| sensing::danger_zone(s.stopping, params.danger_margin))
            .unwrap_or(params.danger_margin);
        let threatened = obstacles
            .iter()
            .filter_map(|o| sensing::ray_hit_distance(agent.pos, dir, o))
            .any(|d| d <= zone);
        if threatened {
            desired = agent.nominal_speed - agent.speed_margin;
        }
    }
    let max_speed = agent.max_speed(params.separation.limits.speed_cap);
    let cmd = MotionCommand::new(heading, desired, max_speed, params.heading);
    safe_command(agent, cmd, neighbors, obstacles, &params.separation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Phase;

    fn obstacle(id: u32, cx: f64, cy: f64, hw: f64, hd: f64) -> Obstacle {
        Obstacle::new(id, Vec2::new(cx, cy), hw, hd).unwrap()
    }

    fn agent(id: usize, pos: Vec2, vel: Vec2) -> AgentState {
        AgentState {
            id,
            pos,
            vel,
            nominal_speed: 10.0,
            speed_margin: 2.0,
            group: None,
            is_leader: false,
            phase: Phase::Disturbance,
        }
    }

    fn params() -> DisturbanceParams {
        DisturbanceParams {
            separation: SeparationParams {
                dist_safe: 2.0,
                dt: 0.1,
                limits: KinematicLimits { max_accel: 2.0, max_turn_rate: std::f64::consts::FRAC_PI_2, speed_cap: 20.0 },
            },
            heading: Vec2::UNIT_Y,
            g: 9.81,
            c_d: 0.3,
            t_c: 0.0,
            danger_margin: 2.0,
        }
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap_between(&obstacle(0, 3.0, 0.0, 2.0, 1.0), &obstacle(1, 11.0, 0.0, 2.0, 1.0)), 4.0);
        assert_eq!(gap_between(&obstacle(0, 0.0, 0.0, 2.0, 2.0), &obstacle(1, 1.0, 1.0, 2.0, 2.0)), 0.0);
        // Corners at (0,0) and (3,4).
        assert_eq!(gap_between(&obstacle(0, -1.0, -1.0, 1.0, 1.0), &obstacle(1, 4.0, 5.0, 1.0, 1.0)), 5.0);
    }

    #[test]
    fn mode_threshold() {
        assert_eq!(choose_mode(5.0, 2.0), AvoidanceMode::GapTransit);
        assert_eq!(choose_mode(1.5, 2.0), AvoidanceMode::Enveloped);
        assert_eq!(choose_mode(2.0, 2.0), AvoidanceMode::Enveloped);
    }

    #[test]
    fn enveloping_merges_close_pairs() {
        let a = obstacle(0, -5.0, 50.0, 4.0, 2.0);
        let b = obstacle(1, 4.5, 50.0, 4.0, 2.0);
        let set = build_routes(&[a, b], 2.0);
        assert_eq!(set.mode, AvoidanceMode::Enveloped);
        assert_eq!(set.blocks.len(), 1);
        assert_eq!(set.routes.len(), 2);
        assert_eq!(set.blocks[0].min_x(), -9.0);
        assert_eq!(set.blocks[0].max_x(), 8.5);

        let c = obstacle(2, 10.0, 50.0, 4.0, 2.0);
        let set = build_routes(&[a, c], 2.0);
        assert_eq!(set.mode, AvoidanceMode::GapTransit);
        assert_eq!(set.routes.len(), 3);
        assert_eq!(set.routes[1].width(), 7.0);
    }

    #[test]
    fn corner_waypoint_offsets_laterally() {
        let o = obstacle(0, 0.0, 0.0, 5.0, 1.0);
        let set = build_routes(&[o], 2.0);
        let wps = plan_route(Vec2::new(0.0, -30.0), &set.routes[1], 2.0, 2.0).unwrap();
        assert_eq!(wps[0], Vec2::new(7.0, -1.0));
        assert_eq!(wps[1], Vec2::new(7.0, 3.0));
        let wps = plan_route(Vec2::new(0.0, -30.0), &set.routes[0], 2.0, 2.0).unwrap();
        assert_eq!(wps[0], Vec2::new(-7.0, -1.0));
    }

    #[test]
    fn gap_waypoints_on_centreline() {
        let a = obstacle(0, 0.0, 20.0, 2.0, 2.0);
        let b = obstacle(1, 14.0, 20.0, 2.0, 2.0);
        let set = build_routes(&[a, b], 2.0);
        let wps = plan_route(Vec2::ZERO, &set.routes[1], 2.0, 2.0).unwrap();
        assert_eq!(wps.len(), 3);
        assert!(wps.iter().all(|w| w.x == 7.0));
    }

    #[test]
    fn narrow_gap_is_infeasible() {
        let route = Route::Gap { front: 0.0, back: 2.0, left_x: 0.0, right_x: 3.0 };
        assert!(matches!(plan_route(Vec2::new(0.0, -10.0), &route, 2.0, 2.0), Err(AvoidanceError::GapTooNarrow { .. })));
    }

    #[test]
    fn passed_waypoints_dropped() {
        let route = Route::Right { front: 0.0, back: 4.0, edge_x: 5.0 };
        let wps = plan_route(Vec2::new(8.0, 1.0), &route, 2.0, 2.0).unwrap();
        assert_eq!(wps, vec![Vec2::new(7.0, 6.0)]);
    }

    /// Dense boundary sampling: every waypoint keeps the clearance from every
    /// obstacle in the set.
    #[test]
    fn waypoint_clearance_oracle() {
        let sets = [
            vec![obstacle(0, 0.0, 40.0, 6.0, 3.0)],
            vec![obstacle(0, -10.0, 40.0, 5.0, 2.0), obstacle(1, 8.0, 42.0, 4.0, 3.0)],
            vec![obstacle(0, -10.0, 40.0, 5.0, 2.0), obstacle(1, 8.0, 42.0, 4.0, 3.0), obstacle(2, 25.0, 39.0, 3.0, 1.0)],
        ];
        for obs in sets {
            let set = build_routes(&obs, 2.0);
            for route in &set.routes {
                let Ok(wps) = plan_route(Vec2::new(0.0, -100.0), route, 3.0, 2.0) else { continue };
                for w in wps {
                    for o in &obs {
                        let c = o.corners();
                        for i in 0..4 {
                            for k in 0..=2000 {
                                let q = c[i] + (c[(i + 1) % 4] - c[i]) * (k as f64 / 2000.0);
                                assert!(w.distance(q) >= 2.0 - 1e-9, "waypoint {w:?} too close to {o:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn queue_order() {
        let agents = [
            agent(0, Vec2::new(0.0, 12.0), Vec2::ZERO),
            agent(1, Vec2::new(1.0, 10.0), Vec2::ZERO),
            agent(2, Vec2::new(2.0, 11.0), Vec2::ZERO),
        ];
        assert_eq!(merge_queue(&agents, Vec2::UNIT_Y), vec![0, 2, 1]);
        assert_eq!(merge_queue(&agents[..1], Vec2::UNIT_Y), vec![0]);
        let tie = [agent(5, Vec2::new(0.0, 3.0), Vec2::ZERO), agent(4, Vec2::new(6.0, 3.0), Vec2::ZERO)];
        assert_eq!(merge_queue(&tie, Vec2::UNIT_Y), vec![4, 5]);
    }

    #[test]
    fn clear_path_keeps_cruise_speed() {
        let a = agent(0, Vec2::ZERO, Vec2::new(0.0, 10.0));
        let cmd = disturbance_command(&a, Some(Vec2::new(0.0, 50.0)), &[], &[], &params());
        assert_eq!(cmd.speed, 10.0);
    }

    #[test]
    fn equilibrium_behind_predecessor() {
        let p = params();
        let lead = agent(1, Vec2::new(0.0, 2.0), Vec2::new(0.0, 10.0));
        let lead_next = kinematics::step(&lead, &MotionCommand::new(Vec2::UNIT_Y, 10.0, 12.0, Vec2::UNIT_Y), 0.1, &p.separation.limits);
        let follower = agent(0, Vec2::ZERO, Vec2::new(0.0, 10.0));
        let cmd = disturbance_command(&follower, None, &[&lead_next], &[], &p);
        assert_eq!(cmd.speed, 10.0);
    }

    /// Distance covered when braking from `u` at 2 m/s^2 in 0.1 s ticks.
    fn discrete_braking_distance(mut u: f64) -> f64 {
        let mut d = 0.0;
        while u > 0.0 {
            d += u * 0.1;
            u = (u - 0.2).max(0.0);
        }
        d
    }

    /// A stopped agent just inside the braking envelope: the follower is told
    /// to stop, and the resulting clearance stays at or above the safe distance.
    #[test]
    fn brakes_for_stopped_predecessor() {
        let p = params();
        let gap = 2.0 + 10.0 * 0.1 + discrete_braking_distance(9.8) + 0.05;
        let stopped = agent(1, Vec2::new(0.0, gap), Vec2::ZERO);
        let mut follower = agent(0, Vec2::ZERO, Vec2::new(0.0, 10.0));
        let cmd = disturbance_command(&follower, None, &[&stopped], &[], &p);
        assert_eq!(cmd.speed, 0.0);
        let braking = crate::sensing::stopping_distance(10.0, 9.81, 0.3, 0.0).unwrap();
        assert!(gap > braking.stopping, "gap sits beyond the nominal stopping distance");
        let mut came_to_rest = false;
        for _ in 0..200 {
            let cmd = disturbance_command(&follower, None, &[&stopped], &[], &p);
            follower = kinematics::step(&follower, &cmd, 0.1, &p.separation.limits);
            assert!(follower.pos.distance(stopped.pos) >= 2.0 - 1e-9);
            came_to_rest |= follower.speed() == 0.0;
        }
        assert!(came_to_rest);
        // Once stopped it sidesteps and passes.
        assert!(follower.pos.y > stopped.pos.y);
        assert!(follower.pos.x.abs() >= 2.0);
    }

    #[test]
    fn keeps_safe_distance_when_room_allows() {
        let p = params();
        let stopped = agent(1, Vec2::new(0.0, 40.0), Vec2::ZERO);
        let mut follower = agent(0, Vec2::ZERO, Vec2::new(0.0, 10.0));
        for _ in 0..300 {
            let cmd = disturbance_command(&follower, None, &[&stopped], &[], &p);
            follower = kinematics::step(&follower, &cmd, 0.1, &p.separation.limits);
            assert!(follower.pos.distance(stopped.pos) >= 2.0 - 1e-9);
        }
    }

    #[test]
    fn danger_zone_slows_agent() {
        let a = agent(0, Vec2::ZERO, Vec2::new(0.0, 10.0));
        let wall = obstacle(0, 0.0, 15.0, 5.0, 1.0);
        // Strong brakes so that only the danger zone is in play.
        let mut p = params();
        p.separation.limits.max_accel = 8.0;
        let cmd = disturbance_command(&a, None, &[], &[wall], &p);
        assert_eq!(cmd.speed, 8.0);
    }

    #[test]
    fn brakes_before_obstacle_within_stopping_reach() {
        let a = agent(0, Vec2::ZERO, Vec2::new(0.0, 10.0));
        let wall = obstacle(0, 0.0, 22.0, 5.0, 1.0);
        let p = params().separation;
        let cmd = safe_command(&a, MotionCommand { heading: Vec2::UNIT_Y, speed: 10.0 }, &[], &[wall], &p);
        assert_eq!(cmd.speed, 0.0);

        // A lane 3 m beside the wall is unaffected.
        let beside = agent(0, Vec2::new(8.0, 0.0), Vec2::new(0.0, 10.0));
        let cmd = safe_command(&beside, MotionCommand { heading: Vec2::UNIT_Y, speed: 10.0 }, &[], &[wall], &p);
        assert_eq!(cmd.speed, 10.0);
    }

    #[test]
    fn obstacle_braking_oracle() {
        // Closed form: braking along +y from y0 at speed v stops after the
        // discrete sum of v_k dt; a wall at distance D is safe iff that sum
        // stays below D - dist_safe.
        let p = params().separation;
        for v in [2.0, 6.0, 10.0] {
            let mut travel = 0.0;
            let mut u: f64 = v;
            while u > 0.0 {
                travel += u * 0.1;
                u = (u - 0.2).max(0.0);
            }
            let next = agent(0, Vec2::ZERO, Vec2::new(0.0, v));
            let at = |gap: f64| obstacle(0, 0.0, gap + 1.0, 5.0, 1.0);
            assert!(braking_clear_of_obstacles(&next, &[at(travel + 2.0 + 1e-6)], &p));
            assert!(!braking_clear_of_obstacles(&next, &[at(travel + 2.0 - 1e-3)], &p));
        }
    }
}
