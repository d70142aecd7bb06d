//! Energy accounting from a power-versus-speed curve.

use serde::{Deserialize, Serialize};

use crate::error::EnergyError;

/// Piecewise-linear power curve over `(speed m/s, power W)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PowerModel {
    samples: Vec<(f64, f64)>,
}

impl PowerModel {
    /// Validates: at least three samples, speeds strictly increasing, powers
    /// positive, and one interior minimum (strictly falling then rising).
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, EnergyError> {
        if samples.len() < 3 {
            return Err(EnergyError::TooFewSamples);
        }
        for (i, &(v, p)) in samples.iter().enumerate() {
            if p.is_nan() || p <= 0.0 || p.is_infinite() {
                return Err(EnergyError::NonPositivePower(i));
            }
            if !v.is_finite() || (i > 0 && v <= samples[i - 1].0) {
                return Err(EnergyError::NotIncreasing(i));
            }
        }
        let argmin = (0..samples.len())
            .min_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1))
            .unwrap_or(0);
        let falling = samples[..=argmin].windows(2).all(|w| w[1].1 < w[0].1);
        let rising = samples[argmin..].windows(2).all(|w| w[1].1 > w[0].1);
        if argmin == 0 || argmin == samples.len() - 1 || !falling || !rising {
            return Err(EnergyError::NoInteriorMinimum);
        }
        Ok(Self { samples })
    }

    /// Quadrotor-like curve: hover at 240 W, minimum 150 W at 10 m/s, steep
    /// rise past 20 m/s.
    pub fn default_quadrotor() -> Self {
        Self::new(vec![
            (0.0, 240.0),
            (2.0, 225.0),
            (4.0, 205.0),
            (6.0, 185.0),
            (8.0, 165.0),
            (10.0, 150.0),
            (12.0, 185.0),
            (14.0, 222.0),
            (16.0, 262.0),
            (18.0, 305.0),
            (20.0, 350.0),
            (22.0, 460.0),
            (25.0, 700.0),
        ])
        .expect("default power table is valid")
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Interpolated power, clamped to the end samples outside the table.
    pub fn power_at(&self, speed: f64) -> f64 {
        let s = &self.samples;
        let first = s[0];
        let last = s[s.len() - 1];
        if speed <= first.0 {
            return first.1;
        }
        if speed >= last.0 {
            return last.1;
        }
        let k = s.partition_point(|&(v, _)| v <= speed);
        let (v0, p0) = s[k - 1];
        let (v1, p1) = s[k];
        if speed == v0 {
            return p0;
        }
        p0 + (p1 - p0) * (speed - v0) / (v1 - v0)
    }

    /// Speed with the lowest sampled power.
    pub fn endurance_speed(&self) -> f64 {
        self.samples
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|s| s.0)
            .unwrap_or(0.0)
    }
}

impl Default for PowerModel {
    fn default() -> Self {
        Self::default_quadrotor()
    }
}

impl TryFrom<Vec<(f64, f64)>> for PowerModel {
    type Error = EnergyError;
    fn try_from(samples: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Self::new(samples)
    }
}

impl From<PowerModel> for Vec<(f64, f64)> {
    fn from(m: PowerModel) -> Self {
        m.samples
    }
}

/// Per-agent energy integrated as a left Riemann sum of `P(v) dt`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyLedger {
    pub per_agent: Vec<f64>,
    pub t_start: f64,
    pub t_end: f64,
}

impl EnergyLedger {
    pub fn new(n_agents: usize, t_start: f64) -> Self {
        Self { per_agent: vec![0.0; n_agents], t_start, t_end: t_start }
    }

    /// Charges each agent `P(speed) * dt`.
    pub fn accumulate(&mut self, speeds: &[f64], model: &PowerModel, dt: f64) {
        debug_assert_eq!(speeds.len(), self.per_agent.len());
        for (e, &v) in self.per_agent.iter_mut().zip(speeds) {
            *e += model.power_at(v) * dt;
        }
        self.t_end += dt;
    }

    pub fn swarm_total(&self) -> f64 {
        self.per_agent.iter().sum()
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// `(E_b - E_a) / E_a * 100`.
pub fn compare_runs(a: &EnergyLedger, b: &EnergyLedger) -> Result<f64, EnergyError> {
    relative_delta(a.swarm_total(), b.swarm_total())
}

pub fn relative_delta(e_a: f64, e_b: f64) -> Result<f64, EnergyError> {
    if e_a == 0.0 {
        return Err(EnergyError::ZeroReference);
    }
    Ok((e_b - e_a) / e_a * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_between_samples() {
        let m = PowerModel { samples: vec![(0.0, 250.0), (10.0, 150.0)] };
        assert_eq!(m.power_at(5.0), 200.0);
        assert_eq!(m.power_at(0.0), 250.0);
        assert_eq!(m.power_at(10.0), 150.0);
        assert_eq!(m.power_at(30.0), 150.0);
    }

    #[test]
    fn exact_at_samples() {
        let m = PowerModel::default_quadrotor();
        for &(v, p) in m.samples() {
            assert_eq!(m.power_at(v), p);
        }
    }

    #[test]
    fn default_minimum_at_ten() {
        let m = PowerModel::default_quadrotor();
        assert_eq!(m.endurance_speed(), 10.0);
        for k in 0..=2500 {
            let v = k as f64 * 0.01;
            assert!(m.power_at(v) >= m.power_at(10.0));
        }
    }

    #[test]
    fn endurance_speed_cheapest_per_metre() {
        let m = PowerModel::default_quadrotor();
        let per_metre = |v: f64| m.power_at(v) / v;
        let best = per_metre(10.0);
        for k in 1..2000 {
            let v = k as f64 * 0.01;
            if (v - 10.0).abs() > 1e-9 {
                assert!(per_metre(v) > best, "v={v}");
            }
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(PowerModel::new(vec![(0.0, 1.0), (1.0, 2.0)]), Err(EnergyError::TooFewSamples)));
        assert!(matches!(PowerModel::new(vec![(0.0, 3.0), (0.0, 2.0), (1.0, 4.0)]), Err(EnergyError::NotIncreasing(1))));
        assert!(matches!(PowerModel::new(vec![(0.0, 3.0), (1.0, 0.0), (2.0, 4.0)]), Err(EnergyError::NonPositivePower(1))));
        assert!(matches!(PowerModel::new(vec![(0.0, 3.0), (1.0, 2.0), (2.0, 1.0)]), Err(EnergyError::NoInteriorMinimum)));
        assert!(matches!(
            PowerModel::new(vec![(0.0, 3.0), (1.0, 2.0), (2.0, 2.5), (3.0, 2.2), (4.0, 5.0)]),
            Err(EnergyError::NoInteriorMinimum)
        ));
    }

    #[test]
    fn constant_power_for_ten_seconds() {
        let m = PowerModel::new(vec![(0.0, 300.0), (5.0, 200.0), (10.0, 250.0)]).unwrap();
        let mut l = EnergyLedger::new(1, 0.0);
        for _ in 0..100 {
            l.accumulate(&[5.0], &m, 0.1);
        }
        assert!((l.swarm_total() - 2000.0).abs() < 1e-9);
        assert!((l.duration() - 10.0).abs() < 1e-9);
        assert_eq!(EnergyLedger::new(3, 0.0).swarm_total(), 0.0);
    }

    #[test]
    fn halving_dt_is_stable() {
        let m = PowerModel::default_quadrotor();
        let speed = |t: f64| 10.0 + 4.0 * (t * 0.3).sin();
        let run = |dt: f64| {
            let mut l = EnergyLedger::new(1, 0.0);
            let n = (30.0 / dt).round() as usize;
            for k in 0..n {
                l.accumulate(&[speed(k as f64 * dt)], &m, dt);
            }
            l.swarm_total()
        };
        let (a, b) = (run(0.1), run(0.05));
        assert!(((a - b) / b).abs() < 0.01);
    }

    #[test]
    fn additive_and_monotone() {
        let m = PowerModel::default_quadrotor();
        let mut l = EnergyLedger::new(2, 0.0);
        let mut last = l.per_agent.clone();
        let mut parts = [0.0; 2];
        for k in 0..50 {
            let speeds = [k as f64 * 0.4, 10.0];
            let before = l.swarm_total();
            l.accumulate(&speeds, &m, 0.1);
            parts[(k >= 25) as usize] += l.swarm_total() - before;
            assert!(l.per_agent.iter().zip(&last).all(|(a, b)| a >= b));
            last = l.per_agent.clone();
        }
        assert!((parts[0] + parts[1] - l.swarm_total()).abs() < 1e-9);
    }

    #[test]
    fn compare_examples() {
        let delta = relative_delta(54.111, 62.084).unwrap();
        assert!((delta - 14.7).abs() < 0.05, "{delta}");
        assert_eq!(relative_delta(3.0, 3.0).unwrap(), 0.0);
        assert_eq!(relative_delta(3.0, 6.0).unwrap(), 100.0);
        assert!(relative_delta(0.0, 1.0).is_err());
        let a = EnergyLedger { per_agent: vec![1.0, 2.0], t_start: 0.0, t_end: 1.0 };
        assert_eq!(compare_runs(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn serde_round_trip_validates() {
        let m = PowerModel::default_quadrotor();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<PowerModel>(&s).unwrap(), m);
        assert!(serde_json::from_str::<PowerModel>("[[0,1],[1,2]]").is_err());
    }
}
