//! Point-mass motion with bounded linear acceleration and turn rate.

use crate::geometry::{AgentState, Vec2};

/// Desired heading and speed for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionCommand {
    pub heading: Vec2,
    pub speed: f64,
}

impl MotionCommand {
    /// Normalizes `heading` and clamps `speed` to `[0, max_speed]`.
    /// A zero heading falls back to `fallback`.
    pub fn new(heading: Vec2, speed: f64, max_speed: f64, fallback: Vec2) -> Self {
        let heading = heading.normalized().unwrap_or(fallback);
        let speed = if speed.is_nan() { 0.0 } else { speed.clamp(0.0, max_speed) };
        Self { heading, speed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicLimits {
    pub max_accel: f64,
    /// Radians per second.
    pub max_turn_rate: f64,
    pub speed_cap: f64,
}

/// Advances `agent` by one tick of `dt` seconds.
///
/// Position integrates the velocity held at the start of the tick (forward
/// Euler); speed moves towards the commanded speed by at most
/// `max_accel * dt`; heading rotates towards the commanded heading by at most
/// `max_turn_rate * dt`. A stationary agent may take any heading.
pub fn step(agent: &AgentState, cmd: &MotionCommand, dt: f64, limits: &KinematicLimits) -> AgentState {
    let speed = agent.speed();
    let max_speed = agent.max_speed(limits.speed_cap);
    let target_speed = cmd.speed.clamp(0.0, max_speed);
    let dv = limits.max_accel * dt;
    let new_speed = (speed + (target_speed - speed).clamp(-dv, dv)).clamp(0.0, max_speed);

    let heading = match agent.vel.normalized() {
        Some(current) => {
            let angle = current.angle_to(cmd.heading);
            let max_turn = limits.max_turn_rate * dt;
            if angle.abs() <= max_turn {
                cmd.heading
            } else {
                current.rotated(max_turn.copysign(angle))
            }
        }
        None => cmd.heading,
    };

    AgentState {
        pos: agent.pos + agent.vel * dt,
        vel: heading * new_speed,
        ..agent.clone()
    }
}

/// Time to brake from `v` to rest at constant deceleration `a_max`.
pub fn time_to_stop(v: f64, a_max: f64) -> f64 {
    v.max(0.0) / a_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Phase;
    use proptest::prelude::*;

    fn limits() -> KinematicLimits {
        KinematicLimits { max_accel: 2.0, max_turn_rate: std::f64::consts::FRAC_PI_2, speed_cap: 20.0 }
    }

    fn agent(speed: f64) -> AgentState {
        AgentState {
            id: 0,
            pos: Vec2::ZERO,
            vel: Vec2::new(0.0, speed),
            nominal_speed: 10.0,
            speed_margin: 2.0,
            group: None,
            is_leader: false,
            phase: Phase::Formation,
        }
    }

    fn cmd(speed: f64) -> MotionCommand {
        MotionCommand::new(Vec2::UNIT_Y, speed, 12.0, Vec2::UNIT_Y)
    }

    #[test]
    fn steady_state() {
        let next = step(&agent(10.0), &cmd(10.0), 0.1, &limits());
        assert_eq!(next.speed(), 10.0);
        assert!((next.pos.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_ramp_up() {
        let next = step(&agent(10.0), &cmd(12.0), 0.1, &limits());
        assert!((next.speed() - 10.2).abs() < 1e-12);
    }

    #[test]
    fn ramp_down_clamps_at_zero() {
        let mut a = agent(10.0);
        a = step(&a, &cmd(0.0), 0.1, &limits());
        assert!((a.speed() - 9.8).abs() < 1e-12);
        for _ in 0..100 {
            a = step(&a, &cmd(0.0), 0.1, &limits());
            assert!(a.speed() >= 0.0);
        }
        assert_eq!(a.speed(), 0.0);
    }

    #[test]
    fn command_clamps_speed() {
        let c = MotionCommand::new(Vec2::new(3.0, 4.0), 50.0, 12.0, Vec2::UNIT_Y);
        assert_eq!(c.speed, 12.0);
        assert!((c.heading.norm() - 1.0).abs() < 1e-12);
        let c = MotionCommand::new(Vec2::ZERO, -1.0, 12.0, Vec2::UNIT_Y);
        assert_eq!(c.speed, 0.0);
        assert_eq!(c.heading, Vec2::UNIT_Y);
    }

    #[test]
    fn turn_rate_bounded() {
        let c = MotionCommand::new(Vec2::new(1.0, 0.0), 10.0, 12.0, Vec2::UNIT_Y);
        let next = step(&agent(10.0), &c, 0.1, &limits());
        let turned = Vec2::UNIT_Y.angle_to(next.vel).abs();
        assert!((turned - std::f64::consts::FRAC_PI_2 * 0.1).abs() < 1e-12);
    }

    #[test]
    fn time_to_stop_examples() {
        assert_eq!(time_to_stop(10.0, 2.0), 5.0);
        assert_eq!(time_to_stop(0.0, 2.0), 0.0);
        assert_eq!(time_to_stop(20.0, 2.0), 2.0 * time_to_stop(10.0, 2.0));
    }

    /// Closed-form constant-acceleration trajectory vs. Euler: error halves with dt.
    #[test]
    fn euler_error_is_first_order() {
        let horizon = 0.9;
        let run = |dt: f64| {
            let mut a = agent(10.0);
            let n = (horizon / dt).round() as usize;
            for _ in 0..n {
                a = step(&a, &cmd(12.0), dt, &limits());
            }
            let exact = 10.0 * horizon + 0.5 * 2.0 * horizon * horizon;
            (a.pos.y - exact).abs()
        };
        let e1 = run(0.1);
        let e2 = run(0.05);
        let e3 = run(0.025);
        assert!(e1 > 0.0);
        assert!((e1 / e2 - 2.0).abs() < 0.1, "ratio {}", e1 / e2);
        assert!((e2 / e3 - 2.0).abs() < 0.1, "ratio {}", e2 / e3);
    }

    proptest! {
        #[test]
        fn speed_band_and_rate(v0 in 0.0..12.0f64, target in -5.0..40.0f64, hx in -1.0..1.0f64, hy in -1.0..1.0f64) {
            let a = agent(v0);
            let c = MotionCommand::new(Vec2::new(hx, hy), target, 30.0, Vec2::UNIT_Y);
            let next = step(&a, &c, 0.1, &limits());
            prop_assert!(next.speed() <= 12.0 + 1e-12);
            prop_assert!((next.speed() - a.speed()).abs() <= 2.0 * 0.1 + 1e-12);
            prop_assert!(next.vel.is_finite() && next.pos.is_finite());
        }
    }
}
