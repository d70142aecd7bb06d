//! Splitting a group of agents across the routes around an obstacle set.
//!
//! Every route receives a contiguous block of agents in lateral order (the
//! leftmost agents take the leftmost route), so a split is fully described by
//! its group sizes. All size vectors are enumerated, each is scored by a
//! fast-forward simulation of the transit, and the quickest one wins.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::GroupingError;
use crate::geometry::{AgentState, GroupTag, Vec2};

/// Number of routes around `obs_count` obstacles.
pub fn population_factor(obs_count: usize) -> usize {
    obs_count + 1
}

/// One way of distributing agents over the routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCandidate {
    /// Group size per route, left to right.
    pub sizes: Vec<usize>,
    /// `(agent id, route index)` in lateral order.
    pub assignment: Vec<(usize, usize)>,
}

impl SplitCandidate {
    /// Sum of squared group sizes; smaller is more balanced.
    pub fn imbalance(&self) -> usize {
        self.sizes.iter().map(|s| s * s).sum()
    }

    pub fn route_of(&self, agent_id: usize) -> Option<usize> {
        self.assignment.iter().find(|(id, _)| *id == agent_id).map(|(_, r)| *r)
    }
}

/// Agents ordered left to right across `heading`; ties go to the agent
/// further ahead, then the lower id.
pub fn lateral_order(agents: &[AgentState], heading: Vec2) -> Vec<usize> {
    let right = heading.perp_right();
    let mut idx: Vec<usize> = (0..agents.len()).collect();
    idx.sort_by(|&a, &b| {
        let (pa, pb) = (agents[a].pos, agents[b].pos);
        pa.dot(right)
            .total_cmp(&pb.dot(right))
            .then(pb.dot(heading).total_cmp(&pa.dot(heading)))
            .then(agents[a].id.cmp(&agents[b].id))
    });
    idx.into_iter().map(|i| agents[i].id).collect()
}

/// All compositions of `n` into `parts` non-negative parts, lexicographic.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(left - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Candidate from explicit group sizes, using contiguous lateral blocks.
pub fn split_with_sizes(agents: &[AgentState], sizes: &[usize], heading: Vec2) -> SplitCandidate {
    let order = lateral_order(agents, heading);
    let mut assignment = Vec::with_capacity(order.len());
    let mut it = order.into_iter();
    for (route, &size) in sizes.iter().enumerate() {
        for id in it.by_ref().take(size) {
            assignment.push((id, route));
        }
    }
    SplitCandidate { sizes: sizes.to_vec(), assignment }
}

pub fn enumerate_splits(
    agents: &[AgentState],
    routes: usize,
    heading: Vec2,
) -> Result<Vec<SplitCandidate>, GroupingError> {
    if agents.is_empty() {
        return Err(GroupingError::NoAgents);
    }
    if routes == 0 {
        return Err(GroupingError::NoRoutes);
    }
    Ok(compositions(agents.len(), routes)
        .into_iter()
        .map(|sizes| split_with_sizes(agents, &sizes, heading))
        .collect())
}

/// Fast-forward simulation used to score a candidate.
pub trait TransitPredictor: Sync {
    /// Ticks until every member has passed the obstacle centre line, or
    /// `None` if that does not happen within the time budget.
    fn transit_ticks(&self, candidate: &SplitCandidate) -> Option<u64>;

    fn dt(&self) -> f64;
}

/// Predicted transit time in seconds; infinite when the route is blocked.
pub fn predict_transit_time(candidate: &SplitCandidate, predictor: &impl TransitPredictor) -> f64 {
    predictor
        .transit_ticks(candidate)
        .map_or(f64::INFINITY, |t| t as f64 * predictor.dt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedCandidate {
    pub candidate: SplitCandidate,
    pub time: f64,
}

pub fn evaluate_all(candidates: Vec<SplitCandidate>, predictor: &impl TransitPredictor) -> Vec<EvaluatedCandidate> {
    candidates
        .into_par_iter()
        .map(|candidate| {
            let time = predict_transit_time(&candidate, predictor);
            EvaluatedCandidate { candidate, time }
        })
        .collect()
}

/// Index of the quickest candidate. Ties go to the more balanced split, then
/// to the earlier candidate.
pub fn select_plan(evaluated: &[EvaluatedCandidate]) -> Result<usize, GroupingError> {
    evaluated
        .iter()
        .enumerate()
        .filter(|(_, e)| e.time.is_finite())
        .min_by(|(ia, a), (ib, b)| {
            a.time
                .total_cmp(&b.time)
                .then(a.candidate.imbalance().cmp(&b.candidate.imbalance()))
                .then(ia.cmp(ib))
        })
        .map(|(i, _)| i)
        .ok_or(GroupingError::NoFeasiblePlan)
}

/// Per group, the member furthest ahead along `heading`; ties to the lower id.
pub fn nominate_leaders(
    partition: &BTreeMap<usize, GroupTag>,
    agents: &[AgentState],
    heading: Vec2,
) -> BTreeMap<GroupTag, usize> {
    let mut leaders: BTreeMap<GroupTag, &AgentState> = BTreeMap::new();
    for agent in agents {
        let Some(tag) = partition.get(&agent.id) else { continue };
        leaders
            .entry(tag.clone())
            .and_modify(|best| {
                let ord = agent.pos.dot(heading).total_cmp(&best.pos.dot(heading));
                if ord == Ordering::Greater || (ord == Ordering::Equal && agent.id < best.id) {
                    *best = agent;
                }
            })
            .or_insert(agent);
    }
    leaders.into_iter().map(|(t, a)| (t, a.id)).collect()
}

/// The chosen split of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPlan {
    pub parent: GroupTag,
    pub partition: BTreeMap<usize, GroupTag>,
    pub leaders: BTreeMap<GroupTag, usize>,
    /// Predicted transit time, seconds. NaN when the plan was not scored.
    pub predicted_time: f64,
    /// Route index taken by each subgroup.
    pub routes: BTreeMap<GroupTag, usize>,
    pub sizes: Vec<usize>,
}

impl GroupPlan {
    pub fn from_assignment(
        parent: &GroupTag,
        assignment: &[(usize, usize)],
        n_routes: usize,
        predicted_time: f64,
        agents: &[AgentState],
        heading: Vec2,
    ) -> Self {
        let mut sizes = vec![0; n_routes];
        let mut partition = BTreeMap::new();
        let mut routes = BTreeMap::new();
        for &(id, route) in assignment {
            sizes[route] += 1;
            let tag = parent.child(route);
            routes.insert(tag.clone(), route);
            partition.insert(id, tag);
        }
        let leaders = nominate_leaders(&partition, agents, heading);
        Self { parent: parent.clone(), partition, leaders, predicted_time, routes, sizes }
    }
}

/// Enumerates, scores and selects in one go.
pub fn plan_group(
    parent: &GroupTag,
    agents: &[AgentState],
    n_routes: usize,
    heading: Vec2,
    predictor: &impl TransitPredictor,
) -> Result<(GroupPlan, Vec<EvaluatedCandidate>), GroupingError> {
    let evaluated = evaluate_all(enumerate_splits(agents, n_routes, heading)?, predictor);
    let best = select_plan(&evaluated)?;
    let chosen = &evaluated[best];
    let plan = GroupPlan::from_assignment(parent, &chosen.candidate.assignment, n_routes, chosen.time, agents, heading);
    Ok((plan, evaluated))
}
