//! Shared domain types: planar vectors, rectangular obstacles, agents,
//! formations and swarm configuration.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A planar vector in meters (or meters per second for velocities).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };
    pub const UNIT_Y: Vec2 = Vec2 { x: 0.0, y: 1.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn distance_squared(self, other: Vec2) -> f64 {
        (self - other).norm_squared()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| Vec2::new(self.x / n, self.y / n))
    }

    /// Rotates counter-clockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Clockwise perpendicular. For a heading this points to the right.
    pub fn perp_right(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    /// Signed angle from `self` to `other`, counter-clockwise positive.
    pub fn angle_to(self, other: Vec2) -> f64 {
        self.cross(other).atan2(self.dot(other))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Vec2::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// An axis-aligned rectangular obstacle.
///
/// `half_width` is the extent along x and `half_depth` the extent along y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub id: u32,
    pub center: Vec2,
    pub half_width: f64,
    pub half_depth: f64,
}

impl Obstacle {
    pub fn new(id: u32, center: Vec2, half_width: f64, half_depth: f64) -> Result<Self, ConfigError> {
        if !center.is_finite() {
            return Err(ConfigError::invalid("obstacle.center", "must be finite"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(ConfigError::invalid("obstacle.half_width", "must be positive"));
        }
        if !(half_depth > 0.0 && half_depth.is_finite()) {
            return Err(ConfigError::invalid("obstacle.half_depth", "must be positive"));
        }
        Ok(Self { id, center, half_width, half_depth })
    }

    pub fn min_x(&self) -> f64 {
        self.center.x - self.half_width
    }

    pub fn max_x(&self) -> f64 {
        self.center.x + self.half_width
    }

    pub fn min_y(&self) -> f64 {
        self.center.y - self.half_depth
    }

    pub fn max_y(&self) -> f64 {
        self.center.y + self.half_depth
    }

    /// Closest point of the (filled) rectangle to `p`.
    pub fn nearest_point(&self, p: Vec2) -> Vec2 {
        Vec2::new(p.x.clamp(self.min_x(), self.max_x()), p.y.clamp(self.min_y(), self.max_y()))
    }

    /// Distance from `p` to the rectangle, zero inside.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        p.distance(self.nearest_point(p))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min_x() && p.x <= self.max_x() && p.y >= self.min_y() && p.y <= self.max_y()
    }

    /// The four corners, counter-clockwise from the minimum corner.
    pub fn corners(&self) -> [Vec2; 4] {
        [
            Vec2::new(self.min_x(), self.min_y()),
            Vec2::new(self.max_x(), self.min_y()),
            Vec2::new(self.max_x(), self.max_y()),
            Vec2::new(self.min_x(), self.max_y()),
        ]
    }

    /// Smallest axis-aligned rectangle covering both obstacles. Keeps `self.id`.
    pub fn bounding_union(&self, other: &Obstacle) -> Obstacle {
        let min_x = self.min_x().min(other.min_x());
        let max_x = self.max_x().max(other.max_x());
        let min_y = self.min_y().min(other.min_y());
        let max_y = self.max_y().max(other.max_y());
        Obstacle {
            id: self.id,
            center: Vec2::new(0.5 * (min_x + max_x), 0.5 * (min_y + max_y)),
            half_width: 0.5 * (max_x - min_x),
            half_depth: 0.5 * (max_y - min_y),
        }
    }

    /// Minimum distance between the rectangle and the segment `a`-`b`.
    pub fn segment_distance(&self, a: Vec2, b: Vec2) -> f64 {
        if self.contains(a) || self.contains(b) || self.segment_crosses(a, b) {
            return 0.0;
        }
        let corners = self.corners();
        let mut best = self.distance_to(a).min(self.distance_to(b));
        for c in corners {
            best = best.min(point_segment_distance(c, a, b));
        }
        best
    }

    fn segment_crosses(&self, a: Vec2, b: Vec2) -> bool {
        let c = self.corners();
        (0..4).any(|i| segments_intersect(a, b, c[i], c[(i + 1) % 4]))
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Front corners of `o` as seen by a swarm travelling along `heading`,
/// returned `(left, right)`.
pub fn rect_edges(o: &Obstacle, heading: Vec2) -> (Vec2, Vec2) {
    let right = heading.perp_right();
    let corners = o.corners();
    let front = corners.iter().map(|c| c.dot(heading)).fold(f64::INFINITY, f64::min);
    let mut front_corners: Vec<Vec2> = corners
        .iter()
        .copied()
        .filter(|c| c.dot(heading) <= front + 1e-9 * (1.0 + front.abs()))
        .collect();
    front_corners.sort_by(|a, b| a.dot(right).total_cmp(&b.dot(right)));
    (front_corners[0], front_corners[front_corners.len() - 1])
}

/// Maneuver phase of the swarm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Formation,
    Disturbance,
    Convergence,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Formation => "Formation",
            Phase::Disturbance => "Disturbance",
            Phase::Convergence => "Convergence",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hierarchical group label: route indices from the root split downwards.
///
/// `[1]` prints as `N1`, `[1, 2]` as `N12`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupTag(pub Vec<u8>);

impl GroupTag {
    pub fn root() -> Self {
        GroupTag(Vec::new())
    }

    /// Child tag for the route with zero-based index `route`.
    pub fn child(&self, route: usize) -> Self {
        let mut path = self.0.clone();
        path.push(u8::try_from(route + 1).unwrap_or(u8::MAX));
        GroupTag(path)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("N")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 && *idx > 9 {
                f.write_str(".")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub pos: Vec2,
    pub vel: Vec2,
    /// Cruise speed the agent holds whenever possible.
    pub nominal_speed: f64,
    /// Allowed excursion around the cruise speed.
    pub speed_margin: f64,
    pub group: Option<GroupTag>,
    pub is_leader: bool,
    pub phase: Phase,
}

impl AgentState {
    pub fn speed(&self) -> f64 {
        self.vel.norm()
    }

    pub fn max_speed(&self, cap: f64) -> f64 {
        (self.nominal_speed + self.speed_margin).min(cap)
    }
}

/// Slot offsets relative to the swarm anchor, expressed in the swarm frame:
/// `x` lateral (positive to the right of the heading), `y` along the heading.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationSpec {
    slots: Vec<Vec2>,
    heading: Vec2,
    inter_agent_distance: f64,
}

impl FormationSpec {
    pub fn new(slots: Vec<Vec2>, heading: Vec2, inter_agent_distance: f64) -> Result<Self, ConfigError> {
        if !(inter_agent_distance > 0.0 && inter_agent_distance.is_finite()) {
            return Err(ConfigError::invalid("formation.inter_agent_distance", "must be positive"));
        }
        let heading = heading
            .normalized()
            .ok_or_else(|| ConfigError::invalid("formation.heading", "must be a nonzero vector"))?;
        if slots.is_empty() {
            return Err(ConfigError::invalid("formation.slots", "at least one slot is required"));
        }
        if slots.iter().any(|s| !s.is_finite()) {
            return Err(ConfigError::invalid("formation.slots", "must be finite"));
        }
        let tol = 1e-9 * inter_agent_distance;
        for i in 0..slots.len() {
            for j in i + 1..slots.len() {
                let d = slots[i].distance(slots[j]);
                if d < inter_agent_distance - tol {
                    return Err(ConfigError::invalid(
                        "formation.slots",
                        format!("slots {i} and {j} are {d:.3} m apart, closer than inter_agent_distance"),
                    ));
                }
            }
        }
        Ok(Self { slots, heading, inter_agent_distance })
    }

    /// Nested V: an outer V without apex (front pair `spacing` apart, arms at
    /// 45 degrees) and an inner pair trailing the second row. Every slot has its
    /// nearest neighbour at exactly `spacing`, and no two slots share a lateral
    /// coordinate.
    pub fn nested_v(n: usize, spacing: f64, heading: Vec2) -> Result<Self, ConfigError> {
        Self::new(nested_v_offsets(n, spacing), heading, spacing)
    }

    pub fn slots(&self) -> &[Vec2] {
        &self.slots
    }

    pub fn heading(&self) -> Vec2 {
        self.heading
    }

    pub fn inter_agent_distance(&self) -> f64 {
        self.inter_agent_distance
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// World-frame position of slot `i` for the given anchor.
    pub fn slot_position(&self, anchor: Vec2, i: usize) -> Vec2 {
        let s = self.slots[i];
        anchor + self.heading.perp_right() * s.x + self.heading * s.y
    }

    pub fn mirrored(&self) -> Self {
        Self {
            slots: self.slots.iter().map(|s| Vec2::new(-s.x, s.y)).collect(),
            heading: self.heading,
            inter_agent_distance: self.inter_agent_distance,
        }
    }
}

fn nested_v_offsets(n: usize, spacing: f64) -> Vec<Vec2> {
    let diag = std::f64::consts::FRAC_1_SQRT_2;
    let arm = |k: usize| Vec2::new(0.5 + k as f64 * diag, -(k as f64) * diag);
    let second = arm(1);
    let inner = Vec2::new(second.x - 0.5, second.y - 0.75_f64.sqrt());
    let mut pairs = vec![arm(0), arm(1), arm(2), inner];
    let mut k = 3;
    while pairs.len() * 2 < n {
        pairs.push(arm(k));
        k += 1;
    }
    pairs
        .iter()
        .flat_map(|p| [Vec2::new(-p.x, p.y), *p])
        .take(n)
        .map(|p| p * spacing)
        .collect()
}

/// Everything the engine needs besides the obstacle list.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub n_agents: usize,
    pub detection_range: f64,
    /// Minimum allowed distance on either side of an agent, agent size included.
    pub dist_safe: f64,
    pub g: f64,
    /// Air drag coefficient used in the braking-distance formula.
    pub c_d: f64,
    /// Compute/reaction time.
    pub t_c: f64,
    pub dt: f64,
    pub formation: FormationSpec,
    pub start: Vec2,
    pub goal: Vec2,
    pub nominal_speed: f64,
    pub speed_margin: f64,
    pub speed_cap: f64,
    pub max_accel: f64,
    /// Radians per second.
    pub max_turn_rate: f64,
    /// Added to the stopping distance to form the danger zone.
    pub danger_margin: f64,
    /// Extra lateral room added to `dist_safe` when laying out corner lanes.
    pub route_margin: f64,
    /// How far before an obstacle set agents line up on their lane.
    pub approach_lead: f64,
    /// Slot error below which reformation counts as converged.
    pub convergence_tolerance: f64,
    /// How far ahead of the centroid the reformed swarm is anchored.
    pub lookahead: f64,
}

impl SwarmConfig {
    /// Defaults for everything except formation, start and goal.
    pub fn with_defaults(formation: FormationSpec, start: Vec2, goal: Vec2) -> Self {
        Self {
            n_agents: formation.len(),
            detection_range: 30.0,
            dist_safe: 2.0,
            g: 9.81,
            c_d: 0.3,
            t_c: 0.0,
            dt: 0.1,
            formation,
            start,
            goal,
            nominal_speed: 10.0,
            speed_margin: 2.0,
            speed_cap: 20.0,
            max_accel: 2.0,
            max_turn_rate: std::f64::consts::FRAC_PI_2,
            danger_margin: 2.0,
            route_margin: 1.0,
            approach_lead: 5.0,
            convergence_tolerance: 0.5,
            lookahead: 10.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(name, format!("must be positive, got {v}")))
            }
        }
        fn non_negative(name: &str, v: f64) -> Result<(), ConfigError> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(name, format!("must be non-negative, got {v}")))
            }
        }
        if self.n_agents == 0 {
            return Err(ConfigError::invalid("swarm.n_agents", "must be at least 1"));
        }
        if self.formation.len() != self.n_agents {
            return Err(ConfigError::invalid(
                "formation.slots",
                format!("{} slots for {} agents", self.formation.len(), self.n_agents),
            ));
        }
        positive("swarm.dist_safe", self.dist_safe)?;
        positive("swarm.detection_range", self.detection_range)?;
        if self.detection_range <= self.dist_safe {
            return Err(ConfigError::invalid("swarm.detection_range", "must exceed dist_safe"));
        }
        positive("swarm.dt", self.dt)?;
        positive("swarm.g", self.g)?;
        positive("swarm.c_d", self.c_d)?;
        non_negative("swarm.t_c", self.t_c)?;
        positive("swarm.nominal_speed", self.nominal_speed)?;
        non_negative("swarm.speed_margin", self.speed_margin)?;
        if self.speed_margin >= self.nominal_speed {
            return Err(ConfigError::invalid("swarm.speed_margin", "must be below nominal_speed"));
        }
        positive("swarm.speed_cap", self.speed_cap)?;
        if self.nominal_speed > self.speed_cap {
            return Err(ConfigError::invalid("swarm.nominal_speed", "exceeds speed_cap"));
        }
        positive("swarm.max_accel", self.max_accel)?;
        positive("swarm.max_turn_rate", self.max_turn_rate)?;
        non_negative("swarm.danger_margin", self.danger_margin)?;
        non_negative("swarm.route_margin", self.route_margin)?;
        non_negative("swarm.approach_lead", self.approach_lead)?;
        positive("swarm.convergence_tolerance", self.convergence_tolerance)?;
        positive("swarm.lookahead", self.lookahead)?;
        if !self.start.is_finite() {
            return Err(ConfigError::invalid("swarm.start", "must be finite"));
        }
        if !self.goal.is_finite() {
            return Err(ConfigError::invalid("swarm.goal", "must be finite"));
        }
        if self.formation.inter_agent_distance() <= self.dist_safe {
            return Err(ConfigError::invalid(
                "formation.inter_agent_distance",
                "must exceed dist_safe",
            ));
        }
        Ok(())
    }

    /// Clearance the avoidance lanes keep from obstacle boundaries.
    pub fn lane_clearance(&self) -> f64 {
        self.dist_safe + self.route_margin
    }
}

/// Reflects the whole scene, start included, across the line through the
/// world origin along the formation heading. For axis-aligned headings this
/// is a sign flip of one coordinate, so applying it twice is exact.
pub fn mirror_scenario(cfg: &SwarmConfig, obstacles: &[Obstacle]) -> (SwarmConfig, Vec<Obstacle>) {
    let right = cfg.formation.heading().perp_right();
    let reflect = |p: Vec2| p - right * (2.0 * p.dot(right));
    let mut mirrored = cfg.clone();
    mirrored.start = reflect(cfg.start);
    mirrored.goal = reflect(cfg.goal);
    mirrored.formation = cfg.formation.mirrored();
    let obstacles = obstacles
        .iter()
        .map(|o| Obstacle { center: reflect(o.center), ..*o })
        .collect();
    (mirrored, obstacles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg8() -> SwarmConfig {
        let f = FormationSpec::nested_v(8, 4.0, Vec2::UNIT_Y).unwrap();
        SwarmConfig::with_defaults(f, Vec2::ZERO, Vec2::new(0.0, 300.0))
    }

    #[test]
    fn rect_edges_centered() {
        let o = Obstacle::new(0, Vec2::ZERO, 5.0, 1.0).unwrap();
        let (l, r) = rect_edges(&o, Vec2::UNIT_Y);
        assert_eq!(l, Vec2::new(-5.0, -1.0));
        assert_eq!(r, Vec2::new(5.0, -1.0));
    }

    #[test]
    fn rect_edges_translated() {
        let o = Obstacle::new(0, Vec2::new(10.0, 0.0), 2.0, 2.0).unwrap();
        let (l, r) = rect_edges(&o, Vec2::UNIT_Y);
        assert_eq!(l, Vec2::new(8.0, -2.0));
        assert_eq!(r, Vec2::new(12.0, -2.0));
    }

    #[test]
    fn rect_edges_other_headings() {
        let o = Obstacle::new(0, Vec2::ZERO, 5.0, 1.0).unwrap();
        // Travelling along +x: front face is x = -5, left is +y.
        let (l, r) = rect_edges(&o, Vec2::new(1.0, 0.0));
        assert_eq!(l, Vec2::new(-5.0, 1.0));
        assert_eq!(r, Vec2::new(-5.0, -1.0));
    }

    #[test]
    fn zero_extent_rejected() {
        assert!(Obstacle::new(0, Vec2::ZERO, 0.0, 1.0).is_err());
        assert!(Obstacle::new(0, Vec2::ZERO, 1.0, -1.0).is_err());
    }

    #[test]
    fn mirror_examples() {
        let cfg = cfg8();
        let obs = [
            Obstacle::new(0, Vec2::new(3.0, 50.0), 2.0, 1.0).unwrap(),
            Obstacle::new(1, Vec2::new(0.0, 50.0), 2.0, 1.0).unwrap(),
        ];
        let (_, m) = mirror_scenario(&cfg, &obs);
        assert_eq!(m[0].center, Vec2::new(-3.0, 50.0));
        assert_eq!(m[1].center, Vec2::new(0.0, 50.0));
        let (cfg2, m2) = mirror_scenario(&mirror_scenario(&cfg, &obs).0, &m);
        assert_eq!(cfg2, cfg);
        assert_eq!(m2, obs);
    }

    #[test]
    fn nested_v_neighbour_spacing() {
        let f = FormationSpec::nested_v(8, 4.0, Vec2::UNIT_Y).unwrap();
        for (i, a) in f.slots().iter().enumerate() {
            let nn = f
                .slots()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| a.distance(*b))
                .fold(f64::INFINITY, f64::min);
            assert!((nn - 4.0).abs() < 1e-9, "slot {i} nn {nn}");
        }
        let mut xs: Vec<f64> = f.slots().iter().map(|s| s.x).collect();
        xs.sort_by(f64::total_cmp);
        assert!(xs.windows(2).all(|w| w[1] - w[0] > 1e-6));
    }

    #[test]
    fn formation_rejects_tight_slots() {
        let slots = vec![Vec2::ZERO, Vec2::new(1.0, 0.0)];
        assert!(FormationSpec::new(slots, Vec2::UNIT_Y, 2.0).is_err());
    }

    #[test]
    fn config_validation_names_field() {
        let mut cfg = cfg8();
        cfg.dist_safe = -1.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("dist_safe"), "{err}");
    }

    #[test]
    fn segment_distance_cases() {
        let o = Obstacle::new(0, Vec2::ZERO, 1.0, 1.0).unwrap();
        assert_eq!(o.segment_distance(Vec2::new(-5.0, 0.0), Vec2::new(5.0, 0.0)), 0.0);
        assert!((o.segment_distance(Vec2::new(-5.0, 3.0), Vec2::new(5.0, 3.0)) - 2.0).abs() < 1e-12);
        assert!((o.segment_distance(Vec2::new(4.0, 5.0), Vec2::new(4.0, 9.0)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn group_tag_display() {
        let t = GroupTag::root().child(0).child(1);
        assert_eq!(t.to_string(), "N12");
        assert_eq!(GroupTag::root().child(1).to_string(), "N2");
    }
}
