//! Obstacle detection, time to impact, stopping distance and danger zone.

use crate::error::SensingError;
use crate::geometry::{rect_edges, AgentState, Obstacle, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingParams {
    pub detection_range: f64,
    /// Swarm heading; bearings are measured from it, counter-clockwise positive.
    pub heading: Vec2,
    pub g: f64,
    pub c_d: f64,
    pub t_c: f64,
    pub danger_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSighting {
    pub obstacle_id: u32,
    /// Distance to the nearest boundary point.
    pub distance: f64,
    pub bearing_left: f64,
    pub bearing_right: f64,
    pub time_to_impact: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub detected: bool,
    /// Sorted by distance, then obstacle id.
    pub sightings: Vec<ObstacleSighting>,
    pub danger_zone: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingDistance {
    pub stopping: f64,
    pub reaction: f64,
    pub braking: f64,
}

/// Scans `obstacles` from the agent's position.
pub fn detect(agent: &AgentState, obstacles: &[Obstacle], params: &SensingParams) -> DetectionReport {
    let speed = agent.speed();
    let mut sightings: Vec<ObstacleSighting> = obstacles
        .iter()
        .filter_map(|o| {
            let distance = o.distance_to(agent.pos);
            if distance > params.detection_range {
                return None;
            }
            let (left, right) = rect_edges(o, params.heading);
            Some(ObstacleSighting {
                obstacle_id: o.id,
                distance,
                bearing_left: params.heading.angle_to(left - agent.pos),
                bearing_right: params.heading.angle_to(right - agent.pos),
                time_to_impact: time_to_impact(distance, speed).unwrap_or(f64::INFINITY),
            })
        })
        .collect();
    sightings.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.obstacle_id.cmp(&b.obstacle_id)));

    let stopping = stopping_distance(speed, params.g, params.c_d, params.t_c)
        .map(|s| s.stopping)
        .unwrap_or(0.0);
    DetectionReport {
        detected: !sightings.is_empty(),
        sightings,
        danger_zone: danger_zone(stopping, params.danger_margin),
    }
}

/// `d / v`, or infinity for a stationary agent.
pub fn time_to_impact(distance: f64, speed: f64) -> Result<f64, SensingError> {
    if distance < 0.0 || distance.is_nan() {
        return Err(SensingError::NegativeDistance(distance));
    }
    if speed < 0.0 || speed.is_nan() {
        return Err(SensingError::NegativeSpeed(speed));
    }
    if speed == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(distance / speed)
}

/// Reaction distance `v * t_c`, braking distance `v^2 / (2 g c_d)` and their sum.
pub fn stopping_distance(v: f64, g: f64, c_d: f64, t_c: f64) -> Result<StoppingDistance, SensingError> {
    if v < 0.0 || v.is_nan() {
        return Err(SensingError::NegativeSpeed(v));
    }
    if g.is_nan() || g <= 0.0 {
        return Err(SensingError::NonPositiveParameter("g"));
    }
    if c_d.is_nan() || c_d <= 0.0 {
        return Err(SensingError::NonPositiveParameter("c_d"));
    }
    let braking = v * v / (2.0 * g * c_d);
    let reaction = v * t_c.max(0.0);
    Ok(StoppingDistance { stopping: reaction + braking, reaction, braking })
}

pub fn danger_zone(stopping: f64, margin: f64) -> f64 {
    stopping.max(0.0) + margin.max(0.0)
}

/// Distance along `dir` from `origin` to the rectangle, if the ray hits it.
pub fn ray_hit_distance(origin: Vec2, dir: Vec2, o: &Obstacle) -> Option<f64> {
    let mut t_min: f64 = 0.0;
    let mut t_max = f64::INFINITY;
    for (p, d, lo, hi) in [(origin.x, dir.x, o.min_x(), o.max_x()), (origin.y, dir.y, o.min_y(), o.max_y())] {
        if d.abs() < 1e-15 {
            if p < lo || p > hi {
                return None;
            }
        } else {
            let (t1, t2) = ((lo - p) / d, (hi - p) / d);
            t_min = t_min.max(t1.min(t2));
            t_max = t_max.min(t1.max(t2));
            if t_min > t_max {
                return None;
            }
        }
    }
    Some(t_min * dir.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Phase;
    use proptest::prelude::*;

    fn params(range: f64) -> SensingParams {
        SensingParams { detection_range: range, heading: Vec2::UNIT_Y, g: 9.81, c_d: 0.3, t_c: 0.0, danger_margin: 2.0 }
    }

    fn agent_at(p: Vec2) -> AgentState {
        AgentState {
            id: 0,
            pos: p,
            vel: Vec2::new(0.0, 10.0),
            nominal_speed: 10.0,
            speed_margin: 2.0,
            group: None,
            is_leader: false,
            phase: Phase::Formation,
        }
    }

    #[test]
    fn detects_within_range() {
        let o = Obstacle::new(7, Vec2::new(0.0, 27.0), 4.0, 2.0).unwrap();
        let r = detect(&agent_at(Vec2::ZERO), &[o], &params(30.0));
        assert!(r.detected);
        assert_eq!(r.sightings[0].distance, 25.0);
        assert_eq!(r.sightings[0].obstacle_id, 7);
        assert!(r.sightings[0].bearing_left > 0.0 && r.sightings[0].bearing_right < 0.0);
        assert_eq!(r.sightings[0].time_to_impact, 2.5);

        let r = detect(&agent_at(Vec2::ZERO), &[o], &params(20.0));
        assert!(!r.detected);
        assert!(r.sightings.is_empty());
    }

    /// Brute-force distance: densely sample the rectangle boundary.
    fn sampled_distance(p: Vec2, o: &Obstacle) -> f64 {
        let c = o.corners();
        let mut best = f64::INFINITY;
        for i in 0..4 {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            for k in 0..=4000 {
                let q = a + (b - a) * (k as f64 / 4000.0);
                best = best.min(p.distance(q));
            }
        }
        best
    }

    #[test]
    fn two_obstacles_sorted_by_distance() {
        let far = Obstacle::new(1, Vec2::new(-12.0, 20.0), 3.0, 2.0).unwrap();
        let near = Obstacle::new(2, Vec2::new(9.0, 8.0), 2.0, 1.5).unwrap();
        let p = Vec2::new(0.5, -1.0);
        let r = detect(&agent_at(p), &[far, near], &params(40.0));
        assert_eq!(r.sightings.len(), 2);
        assert_eq!(r.sightings[0].obstacle_id, 2);
        assert_eq!(r.sightings[1].obstacle_id, 1);
        for (s, o) in r.sightings.iter().zip([near, far]) {
            let oracle = sampled_distance(p, &o);
            assert!((s.distance - oracle).abs() < 1e-2, "{} vs {oracle}", s.distance);
        }
    }

    #[test]
    fn time_to_impact_examples() {
        assert_eq!(time_to_impact(50.0, 10.0).unwrap(), 5.0);
        assert_eq!(time_to_impact(0.0, 10.0).unwrap(), 0.0);
        assert_eq!(time_to_impact(10.0, 0.0).unwrap(), f64::INFINITY);
        assert!(time_to_impact(-1.0, 10.0).is_err());
    }

    #[test]
    fn stopping_distance_examples() {
        let s = stopping_distance(10.0, 9.81, 0.3, 0.0).unwrap();
        assert_eq!(s.reaction, 0.0);
        assert_eq!(s.braking, 100.0 / (2.0 * 9.81 * 0.3));
        assert!((s.braking - 16.99).abs() < 0.005);
        assert_eq!(s.stopping, s.braking);

        let z = stopping_distance(0.0, 9.81, 0.3, 0.0).unwrap();
        assert_eq!((z.stopping, z.reaction, z.braking), (0.0, 0.0, 0.0));

        let r = stopping_distance(10.0, 9.81, 0.3, 0.5).unwrap();
        assert_eq!(r.reaction, 5.0);
        assert_eq!(r.stopping, 5.0 + s.braking);

        assert!(stopping_distance(10.0, 0.0, 0.3, 0.0).is_err());
        assert!(stopping_distance(10.0, 9.81, -0.3, 0.0).is_err());
    }

    #[test]
    fn danger_zone_examples() {
        assert_eq!(danger_zone(17.0, 3.0), 20.0);
        assert_eq!(danger_zone(17.0, 0.0), 17.0);
        let dz = |v: f64| danger_zone(stopping_distance(v, 9.81, 0.3, 0.0).unwrap().stopping, 2.0);
        assert!(dz(5.0) < dz(10.0) && dz(10.0) < dz(12.0));
    }

    #[test]
    fn ray_hits() {
        let o = Obstacle::new(0, Vec2::new(0.0, 20.0), 5.0, 1.0).unwrap();
        assert_eq!(ray_hit_distance(Vec2::ZERO, Vec2::UNIT_Y, &o), Some(19.0));
        assert_eq!(ray_hit_distance(Vec2::new(6.0, 0.0), Vec2::UNIT_Y, &o), None);
        assert_eq!(ray_hit_distance(Vec2::ZERO, -Vec2::UNIT_Y, &o), None);
    }

    proptest! {
        #[test]
        fn stopping_distance_increasing(v in 0.01..30.0f64, dv in 0.01..5.0f64) {
            let a = stopping_distance(v, 9.81, 0.3, 0.0).unwrap().stopping;
            let b = stopping_distance(v + dv, 9.81, 0.3, 0.0).unwrap().stopping;
            prop_assert!(b > a);
        }

        /// Rigid motions (translation plus quarter turns) carry distances and
        /// bearings along with the scene.
        #[test]
        fn detection_covariant(
            tx in -50.0..50.0f64, ty in -50.0..50.0f64, quarter in 0usize..4,
            ox in -20.0..20.0f64, oy in 5.0..25.0f64, hw in 0.5..6.0f64, hd in 0.5..6.0f64,
        ) {
            let o = Obstacle::new(0, Vec2::new(ox, oy), hw, hd).unwrap();
            let base = detect(&agent_at(Vec2::ZERO), &[o], &params(60.0));
            let rot = |p: Vec2| (0..quarter).fold(p, |q, _| Vec2::new(-q.y, q.x));
            let shift = Vec2::new(tx, ty);
            let (w, d) = if quarter % 2 == 0 { (hw, hd) } else { (hd, hw) };
            let moved = Obstacle::new(0, rot(o.center) + shift, w, d).unwrap();
            let mut p = params(60.0);
            p.heading = rot(Vec2::UNIT_Y);
            let mut a = agent_at(shift);
            a.vel = rot(a.vel);
            let r = detect(&a, &[moved], &p);
            prop_assert_eq!(base.detected, r.detected);
            let (s0, s1) = (&base.sightings[0], &r.sightings[0]);
            prop_assert!((s0.distance - s1.distance).abs() < 1e-9);
            prop_assert!((s0.bearing_left - s1.bearing_left).abs() < 1e-9);
            prop_assert!((s0.bearing_right - s1.bearing_right).abs() < 1e-9);
        }
    }
}
