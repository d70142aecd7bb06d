//! Restoring the formation after avoidance.
//!
//! The distortion energy between current positions `v_i` and slot targets
//! `x_j` is `sum_i ||x_{m(i)} - v_i||^2` plus a bending term weighted by
//! `lambda`. With `lambda = 0` only the correspondence term remains, so
//! minimizing it over bijections `m` is a linear assignment problem, solved
//! exactly here with the shortest-augmenting-path Hungarian method.

use crate::error::AssignmentError;
use crate::geometry::{AgentState, FormationSpec, Vec2};
use crate::kinematics::MotionCommand;

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem {
    pub sources: Vec<Vec2>,
    pub targets: Vec<Vec2>,
    /// `cost[i][j] = ||targets[j] - sources[i]||^2`.
    pub cost: Vec<Vec<f64>>,
    pub lambda: f64,
}

impl AssignmentProblem {
    pub fn new(sources: Vec<Vec2>, targets: Vec<Vec2>) -> Result<Self, AssignmentError> {
        if sources.len() != targets.len() {
            return Err(AssignmentError::SizeMismatch { sources: sources.len(), targets: targets.len() });
        }
        let cost = sources
            .iter()
            .map(|s| targets.iter().map(|t| t.distance_squared(*s)).collect())
            .collect();
        Ok(Self { sources, targets, cost, lambda: 0.0 })
    }

    /// Problem over an explicit cost matrix (no geometry attached).
    pub fn from_costs(cost: Vec<Vec<f64>>) -> Self {
        Self { sources: Vec::new(), targets: Vec::new(), cost, lambda: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `mapping[i]` is the slot taken by source `i`.
    pub mapping: Vec<usize>,
    pub total_cost: f64,
}

/// Distortion energy of `mapping`; only `lambda = 0` is supported.
pub fn tps_energy(mapping: &[usize], sources: &[Vec2], targets: &[Vec2], lambda: f64) -> Result<f64, AssignmentError> {
    if lambda != 0.0 {
        return Err(AssignmentError::UnsupportedLambda(lambda));
    }
    if sources.len() != targets.len() || mapping.len() != sources.len() {
        return Err(AssignmentError::SizeMismatch { sources: sources.len(), targets: targets.len() });
    }
    Ok(sources
        .iter()
        .zip(mapping)
        .map(|(s, &j)| targets[j].distance_squared(*s))
        .sum())
}

/// Exact minimum-cost bijection. Among optimal mappings the lexicographically
/// smallest one is returned.
pub fn solve_assignment(problem: &AssignmentProblem) -> Result<Assignment, AssignmentError> {
    if problem.lambda != 0.0 {
        return Err(AssignmentError::UnsupportedLambda(problem.lambda));
    }
    let n = problem.cost.len();
    for (row, r) in problem.cost.iter().enumerate() {
        if r.len() != n {
            return Err(AssignmentError::NotSquare { row, len: r.len(), n });
        }
        if r.iter().any(|c| !c.is_finite()) {
            return Err(AssignmentError::NonFiniteCost);
        }
    }
    if n == 0 {
        return Ok(Assignment { mapping: Vec::new(), total_cost: 0.0 });
    }

    let scale = problem.cost.iter().flatten().fold(0.0_f64, |m, c| m.max(c.abs()));
    let tol = 1e-9 * scale.max(1.0) * n as f64;

    // Fix rows one at a time to the smallest column that still admits an
    // optimal completion.
    let rows: Vec<usize> = (0..n).collect();
    let mut free_cols: Vec<usize> = (0..n).collect();
    let mut remaining = hungarian(&problem.cost, &rows, &free_cols).0;
    let mut mapping = vec![0; n];
    for i in 0..n {
        let rest_rows = &rows[i + 1..];
        let mut chosen = None;
        for (pos, &j) in free_cols.iter().enumerate() {
            let cols: Vec<usize> = free_cols.iter().copied().filter(|&c| c != j).collect();
            let sub = if rest_rows.is_empty() { 0.0 } else { hungarian(&problem.cost, rest_rows, &cols).0 };
            let total = problem.cost[i][j] + sub;
            if total <= remaining + tol {
                chosen = Some((pos, j, sub));
                break;
            }
        }
        // An optimal completion always exists; fall back to the unrestricted
        // solver if rounding hid it.
        let (pos, j, sub) = chosen.unwrap_or_else(|| {
            let (_, assign) = hungarian(&problem.cost, &rows[i..], &free_cols);
            let j = assign[0];
            let pos = free_cols.iter().position(|&c| c == j).unwrap_or(0);
            let cols: Vec<usize> = free_cols.iter().copied().filter(|&c| c != j).collect();
            let sub = if rest_rows.is_empty() { 0.0 } else { hungarian(&problem.cost, rest_rows, &cols).0 };
            (pos, j, sub)
        });
        mapping[i] = j;
        free_cols.remove(pos);
        remaining = sub;
    }
    let total_cost = mapping.iter().enumerate().map(|(i, &j)| problem.cost[i][j]).sum();
    Ok(Assignment { mapping, total_cost })
}

/// Hungarian method on the submatrix `rows x cols` (equal lengths). Returns
/// the optimal cost and, per row, the chosen column (as an index into the
/// original matrix).
fn hungarian(cost: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> (f64, Vec<usize>) {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    let c = |i: usize, j: usize| cost[rows[i - 1]][cols[j - 1]];
    // 1-based potentials, matching[j] = row matched to column j.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matching = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matching[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matching[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = c(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matching[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matching[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matching[j0] = matching[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[matching[j] - 1] = cols[j - 1];
    }
    let total = (0..n).map(|i| cost[rows[i]][assign[i]]).sum();
    (total, assign)
}

/// Anchor one `lookahead` from the centroid towards `goal`, and the slot
/// positions around it.
pub fn next_swarm_location(positions: &[Vec2], goal: Vec2, formation: &FormationSpec, lookahead: f64) -> (Vec2, Vec<Vec2>) {
    let n = positions.len().max(1) as f64;
    let centroid = positions.iter().fold(Vec2::ZERO, |acc, p| acc + *p) * (1.0 / n);
    let to_goal = goal - centroid;
    let step = if to_goal.norm() <= lookahead {
        to_goal
    } else {
        to_goal.normalized().unwrap_or(formation.heading()) * lookahead
    };
    let anchor = centroid + step;
    let targets = (0..formation.len()).map(|i| formation.slot_position(anchor, i)).collect();
    (anchor, targets)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingParams {
    /// Proportional gain on the slot error, 1/s.
    pub gain: f64,
    pub tolerance: f64,
    /// Allowed deviation of pair distances from the formation's.
    pub spacing_tolerance: f64,
    pub speed_cap: f64,
    pub heading: Vec2,
}

/// Slot-tracking commands (feed-forward anchor velocity plus proportional
/// correction) and whether the swarm has converged onto its slots.
///
/// `slot_of[i]` is the slot assigned to `agents[i]`, `targets` the current
/// slot positions.
pub fn reformation_tick(
    agents: &[AgentState],
    slot_of: &[usize],
    targets: &[Vec2],
    anchor_velocity: Vec2,
    params: &TrackingParams,
) -> (Vec<MotionCommand>, bool) {
    let commands = agents
        .iter()
        .zip(slot_of)
        .map(|(a, &slot)| {
            let desired = anchor_velocity + (targets[slot] - a.pos) * params.gain;
            MotionCommand::new(desired, desired.norm(), a.max_speed(params.speed_cap), params.heading)
        })
        .collect();
    (commands, is_converged(agents, slot_of, targets, params))
}

pub fn is_converged(agents: &[AgentState], slot_of: &[usize], targets: &[Vec2], params: &TrackingParams) -> bool {
    let within = agents
        .iter()
        .zip(slot_of)
        .all(|(a, &s)| a.pos.distance(targets[s]) <= params.tolerance);
    within
        && (0..agents.len()).all(|i| {
            (i + 1..agents.len()).all(|j| {
                let want = targets[slot_of[i]].distance(targets[slot_of[j]]);
                (agents[i].pos.distance(agents[j].pos) - want).abs() <= params.spacing_tolerance
            })
        })
}
