//! Sampling-based tree planner: uniform free-space sampling with goal bias,
//! optimal-control steering to each sample, parent selection by combined
//! cost, rewiring through new nodes, and incremental robustness propagation.
//!
//! Edge cost is `control_cost + mu2 * specification_cost`, where the
//! specification cost is the telescoping drop in capped robustness. Those
//! edge costs can be negative (an edge that improves robustness), which a
//! tree tolerates: path costs still telescope, so no negative cycles exist.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{DynamicsError, SystemModel};
use crate::logic::{CompiledFormula, LogicError, RobustnessState};
use crate::scenario::{Scenario, ScenarioError, Weights};
use crate::steering::{SteeringContext, SteeringEdge, TauRange};

/// Goal-bias probability for free-space sampling.
pub const GOAL_BIAS: f64 = 0.05;
/// Consecutive rejected samples before the workspace is declared saturated.
const MAX_SAMPLE_REJECTIONS: usize = 10_000;
/// Cap on candidate parents examined per extension, `max(8, 2.5 ln n)`.
fn candidate_cap(n: usize) -> usize {
    8usize.max((2.5 * ((n + 1) as f64).ln()).ceil() as usize)
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("free space appears empty: {MAX_SAMPLE_REJECTIONS} consecutive samples rejected")]
    WorkspaceSaturated,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub state: DVector<f64>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Accumulated combined cost from the root.
    pub cost_to_come: f64,
    /// Sum of edge arrival times along the path, s.
    pub arrival_time: f64,
    pub robustness: RobustnessState,
    /// Incoming edge; absent at the root.
    pub edge: Option<SteeringEdge>,
}

#[derive(Debug, Clone)]
pub struct PlanTree {
    pub nodes: Vec<TreeNode>,
    pub goal_id: Option<usize>,
}

impl PlanTree {
    /// Ids of all nodes with Euclidean state distance strictly below `r`.
    pub fn near_set(&self, state: &DVector<f64>, r: f64) -> Vec<usize> {
        assert!(r > 0.0);
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| (&n.state - state).norm() < r)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn nearest(&self, state: &DVector<f64>) -> usize {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| ((&n.state - state).norm(), i))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .map(|(_, i)| i)
            .expect("tree is never empty")
    }

    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut path = vec![id];
        let mut cursor = id;
        while let Some(parent) = self.nodes[cursor].parent {
            path.push(parent);
            cursor = parent;
        }
        path.reverse();
        path
    }

    fn is_ancestor(&self, candidate: usize, of: usize) -> bool {
        let mut cursor = self.nodes[of].parent;
        while let Some(id) = cursor {
            if id == candidate {
                return true;
            }
            cursor = self.nodes[id].parent;
        }
        false
    }

    /// Structural audit: parent links form a tree rooted at 0, every node's
    /// cost and robustness equal a from-scratch recomputation along its
    /// path, and children lists mirror parent links.
    pub fn validate(&self, monitor: &CompiledFormula, weights: &Weights, position_dim: usize) -> Result<(), String> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(id) = stack.pop() {
            for &child in &self.nodes[id].children {
                if seen[child] {
                    return Err(format!("node {child} reached twice: not a tree"));
                }
                if self.nodes[child].parent != Some(id) {
                    return Err(format!("child {child} does not point back to {id}"));
                }
                seen[child] = true;
                stack.push(child);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err("unreachable node: broken parent links".into());
        }
        for id in 1..n {
            let node = &self.nodes[id];
            let parent = node.parent.ok_or_else(|| format!("non-root node {id} has no parent"))?;
            let edge = node.edge.as_ref().ok_or_else(|| format!("node {id} has no incoming edge"))?;
            let segment: Vec<Vec<f64>> = edge.states[1..]
                .iter()
                .map(|x| x.as_slice()[..position_dim].to_vec())
                .collect();
            let expected_rob = monitor
                .update(&self.nodes[parent].robustness, segment.iter().map(|s| s.as_slice()))
                .map_err(|e| e.to_string())?;
            if (expected_rob.root() - node.robustness.root()).abs() > 1e-9 {
                return Err(format!("node {id} robustness diverged from recomputation"));
            }
            let tltl = monitor.edge_cost(&self.nodes[parent].robustness, &expected_rob);
            let expected_cost =
                self.nodes[parent].cost_to_come + edge.control_cost + weights.robustness * tltl;
            if (expected_cost - node.cost_to_come).abs() > 1e-9 * (1.0 + expected_cost.abs()) {
                return Err(format!("node {id} cost diverged from recomputation"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlanStats {
    pub iterations: usize,
    pub nodes: usize,
    pub rejected_edges: usize,
    pub rejected_samples: usize,
    pub wall_time: f64,
}

/// A concatenated root-to-goal trajectory.
#[derive(Debug, Clone)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub controls: Vec<DVector<f64>>,
    pub total_cost: f64,
    pub root_robustness: f64,
    pub satisfied: bool,
    /// Largest per-component input magnitude along the trajectory.
    pub max_control_effort: f64,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    /// Best goal-reaching trajectory, if the goal was ever connected:
    /// minimum-cost among satisfying connections, otherwise the
    /// best-robustness connection with `satisfied = false`.
    pub solution: Option<Solution>,
    pub stats: PlanStats,
    pub tree: PlanTree,
}

/// Plans the scenario with its embedded seed and budgets.
pub fn plan(scenario: &Scenario) -> Result<PlanResult, PlanError> {
    scenario.validate()?;
    let model = scenario.model()?;
    let formula = scenario.formula()?;
    let monitor = CompiledFormula::compile(&formula, scenario.rho_max());
    Planner::new(scenario, model, monitor)?.run()
}

struct GoalSnapshot {
    cost: f64,
    robustness: f64,
    solution: Solution,
}

struct Planner<'s> {
    scenario: &'s Scenario,
    model: SystemModel,
    monitor: CompiledFormula,
    ctx: SteeringContext,
    tree: PlanTree,
    rng: ChaCha8Rng,
    mu1: f64,
    mu2: f64,
    stats: PlanStats,
    best_satisfied: Option<GoalSnapshot>,
    best_any: Option<GoalSnapshot>,
    gamma: f64,
    radius_cap: f64,
}

impl<'s> Planner<'s> {
    fn new(
        scenario: &'s Scenario,
        model: SystemModel,
        monitor: CompiledFormula,
    ) -> Result<Self, PlanError> {
        let zero_input = DVector::zeros(model.input_dim);
        let lin = model.linearize(&scenario.start, &zero_input)?;
        let range = TauRange::for_system(&lin);
        let ctx = SteeringContext::new(lin, range, scenario.sample_dt);
        let root_rob = monitor.init(&model.position(&scenario.start))?;
        let root = TreeNode {
            state: scenario.start.clone(),
            parent: None,
            children: Vec::new(),
            cost_to_come: 0.0,
            arrival_time: 0.0,
            robustness: root_rob,
            edge: None,
        };
        let diag = model.state_bounds.diagonal();
        Ok(Planner {
            scenario,
            rng: ChaCha8Rng::seed_from_u64(scenario.seed),
            mu1: scenario.weights.control,
            mu2: scenario.weights.robustness,
            stats: PlanStats::default(),
            best_satisfied: None,
            best_any: None,
            gamma: 2.0 * diag,
            radius_cap: diag / 4.0,
            model,
            monitor,
            ctx,
            tree: PlanTree { nodes: vec![root], goal_id: None },
        })
    }

    /// Shrinking near radius, `min(r_max, gamma (ln(n+1)/(n+1))^(1/dim))`.
    fn near_radius(&self) -> f64 {
        let n = self.tree.nodes.len() as f64;
        let dim = self.model.state_dim as f64;
        let schedule = self.gamma * ((n + 1.0).ln() / (n + 1.0)).powf(1.0 / dim);
        schedule.min(self.radius_cap)
    }

    fn run(mut self) -> Result<PlanResult, PlanError> {
        let start = now();
        for iteration in 0..self.scenario.budget.iterations {
            self.stats.iterations = iteration + 1;
            if let Some(limit) = self.scenario.budget.time_seconds {
                if elapsed(start) > limit {
                    break;
                }
            }
            let (sample, is_goal) = self.sample_free()?;
            let new_id = if is_goal && self.tree.goal_id.is_some() {
                let goal_id = self.tree.goal_id.unwrap();
                self.improve_parent(goal_id);
                Some(goal_id)
            } else {
                self.extend(&sample, is_goal)
            };
            if let Some(id) = new_id {
                self.rewire(id);
            }
            self.try_goal_connection();
            self.record_goal_snapshot();

            #[cfg(debug_assertions)]
            if (iteration + 1) % 500 == 0 {
                let weights = Weights { control: self.mu1, robustness: self.mu2 };
                if let Err(msg) = self.tree.validate(&self.monitor, &weights, self.model.position_dim) {
                    panic!("tree invariant violated at iteration {}: {msg}", iteration + 1);
                }
            }
        }
        self.stats.nodes = self.tree.nodes.len();
        self.stats.wall_time = elapsed(start);
        let solution = match (self.best_satisfied, self.best_any) {
            (Some(s), _) => Some(s.solution),
            (None, Some(s)) => Some(s.solution),
            (None, None) => None,
        };
        Ok(PlanResult { solution, stats: self.stats, tree: self.tree })
    }

    /// Uniform sample over the state box, rejected while the position part
    /// touches an obstacle; returns the goal state with the bias
    /// probability.
    fn sample_free(&mut self) -> Result<(DVector<f64>, bool), PlanError> {
        if self.rng.gen_bool(GOAL_BIAS) {
            return Ok((self.scenario.goal.clone(), true));
        }
        let bounds = &self.model.state_bounds;
        for _ in 0..MAX_SAMPLE_REJECTIONS {
            let state = DVector::from_fn(self.model.state_dim, |i, _| {
                self.rng.gen_range(bounds.min[i]..bounds.max[i])
            });
            let position = self.model.position(&state);
            if self.scenario.position_free(&position) {
                return Ok((state, false));
            }
            self.stats.rejected_samples += 1;
        }
        Err(PlanError::WorkspaceSaturated)
    }

    /// Every trajectory sample must stay in free space; obstacle boxes are
    /// closed, so boundary contact counts as a collision.
    fn collision_free(&self, edge: &SteeringEdge) -> bool {
        edge.states.iter().all(|x| {
            let p = self.model.position(x);
            self.scenario.position_free(&p)
        })
    }

    /// Steers parent -> state and prices the edge; `None` when steering,
    /// bounds, or collision reject it.
    fn candidate_edge(
        &mut self,
        parent_id: usize,
        state: &DVector<f64>,
    ) -> Option<(SteeringEdge, RobustnessState, f64)> {
        let parent_state = self.tree.nodes[parent_id].state.clone();
        let edge = match self.ctx.steer(&parent_state, state, self.mu1) {
            Ok(e) => e,
            Err(_) => {
                self.stats.rejected_edges += 1;
                return None;
            }
        };
        if !edge.feasible() || !self.collision_free(&edge) {
            self.stats.rejected_edges += 1;
            return None;
        }
        let segment: Vec<Vec<f64>> = edge.states[1..].iter().map(|x| self.model.position(x)).collect();
        let robustness = self
            .monitor
            .update(&self.tree.nodes[parent_id].robustness, segment.iter().map(|s| s.as_slice()))
            .ok()?;
        let tltl = self.monitor.edge_cost(&self.tree.nodes[parent_id].robustness, &robustness);
        let cost = self.tree.nodes[parent_id].cost_to_come + edge.control_cost + self.mu2 * tltl;
        Some((edge, robustness, cost))
    }

    /// Candidate parent ids: near set capped to the closest few, falling
    /// back to the single nearest node.
    fn candidate_parents(&self, state: &DVector<f64>, exclude: Option<usize>) -> Vec<usize> {
        let r = self.near_radius();
        let mut near: Vec<usize> = self
            .tree
            .near_set(state, r)
            .into_iter()
            .filter(|id| Some(*id) != exclude)
            .collect();
        if near.is_empty() {
            let nearest = self.tree.nearest(state);
            if Some(nearest) != exclude {
                near.push(nearest);
            }
            return near;
        }
        let cap = candidate_cap(self.tree.nodes.len());
        if near.len() > cap {
            near.sort_by(|a, b| {
                let da = (&self.tree.nodes[*a].state - state).norm();
                let db = (&self.tree.nodes[*b].state - state).norm();
                (da, *a).partial_cmp(&(db, *b)).unwrap()
            });
            near.truncate(cap);
            near.sort_unstable();
        }
        near
    }

    /// Algorithm step: pick the parent minimizing cost-to-come plus edge
    /// cost, attach the sample, or discard it when no candidate edge is
    /// valid.
    fn extend(&mut self, state: &DVector<f64>, is_goal: bool) -> Option<usize> {
        let candidates = self.candidate_parents(state, None);
        let mut best: Option<(f64, usize, SteeringEdge, RobustnessState)> = None;
        for parent_id in candidates {
            if let Some((edge, rob, cost)) = self.candidate_edge(parent_id, state) {
                let better = match &best {
                    Some((best_cost, ..)) => cost < *best_cost,
                    None => true,
                };
                if better {
                    best = Some((cost, parent_id, edge, rob));
                }
            }
        }
        let (cost, parent_id, edge, robustness) = best?;
        let id = self.tree.nodes.len();
        let arrival = self.tree.nodes[parent_id].arrival_time + edge.arrival_time;
        self.tree.nodes.push(TreeNode {
            state: state.clone(),
            parent: Some(parent_id),
            children: Vec::new(),
            cost_to_come: cost,
            arrival_time: arrival,
            robustness,
            edge: Some(edge),
        });
        self.tree.nodes[parent_id].children.push(id);
        if is_goal {
            self.tree.goal_id = Some(id);
        }
        Some(id)
    }

    /// Re-runs parent selection for an existing node (used for repeated
    /// goal samples) and reparents on strict improvement.
    fn improve_parent(&mut self, id: usize) {
        let state = self.tree.nodes[id].state.clone();
        let candidates = self.candidate_parents(&state, Some(id));
        for parent_id in candidates {
            if parent_id == id || self.tree.is_ancestor(id, parent_id) {
                continue;
            }
            if let Some((edge, rob, cost)) = self.candidate_edge(parent_id, &state) {
                if cost < self.tree.nodes[id].cost_to_come {
                    self.reparent(id, parent_id, edge, rob, cost);
                }
            }
        }
    }

    /// Rewiring: route near nodes through the new node when that strictly
    /// lowers their cost-to-come, then push cost and robustness updates
    /// down their subtrees.
    fn rewire(&mut self, new_id: usize) {
        let state = self.tree.nodes[new_id].state.clone();
        let near = self.candidate_parents(&state, Some(new_id));
        for target in near {
            if target == 0 || target == new_id {
                continue;
            }
            // Routing an ancestor through its descendant would close a cycle.
            if self.tree.is_ancestor(target, new_id) {
                continue;
            }
            let target_state = self.tree.nodes[target].state.clone();
            let parent_state = self.tree.nodes[new_id].state.clone();
            let edge = match self.ctx.steer(&parent_state, &target_state, self.mu1) {
                Ok(e) => e,
                Err(_) => {
                    self.stats.rejected_edges += 1;
                    continue;
                }
            };
            if !edge.feasible() || !self.collision_free(&edge) {
                self.stats.rejected_edges += 1;
                continue;
            }
            let segment: Vec<Vec<f64>> =
                edge.states[1..].iter().map(|x| self.model.position(x)).collect();
            let Ok(robustness) = self.monitor.update(
                &self.tree.nodes[new_id].robustness,
                segment.iter().map(|s| s.as_slice()),
            ) else {
                continue;
            };
            let tltl = self.monitor.edge_cost(&self.tree.nodes[new_id].robustness, &robustness);
            let cost = self.tree.nodes[new_id].cost_to_come + edge.control_cost + self.mu2 * tltl;
            if cost < self.tree.nodes[target].cost_to_come {
                self.reparent(target, new_id, edge, robustness, cost);
            }
        }
    }

    fn reparent(
        &mut self,
        id: usize,
        new_parent: usize,
        edge: SteeringEdge,
        robustness: RobustnessState,
        cost: f64,
    ) {
        let old_parent = self.tree.nodes[id].parent.expect("root is never reparented");
        let position = self.tree.nodes[old_parent].children.iter().position(|c| *c == id);
        if let Some(at) = position {
            self.tree.nodes[old_parent].children.remove(at);
        }
        let arrival = self.tree.nodes[new_parent].arrival_time + edge.arrival_time;
        {
            let node = &mut self.tree.nodes[id];
            node.parent = Some(new_parent);
            node.cost_to_come = cost;
            node.arrival_time = arrival;
            node.robustness = robustness;
            node.edge = Some(edge);
        }
        self.tree.nodes[new_parent].children.push(id);
        self.propagate_subtree(id);
    }

    /// Recomputes cost, arrival time, and robustness below `id` after its
    /// path changed. Control costs of stored edges are unaffected; the
    /// specification cost is re-derived from the new parent states.
    fn propagate_subtree(&mut self, id: usize) {
        let mut stack = self.tree.nodes[id].children.clone();
        while let Some(child) = stack.pop() {
            let parent = self.tree.nodes[child].parent.expect("child has a parent");
            let edge_states: Vec<Vec<f64>> = {
                let edge = self.tree.nodes[child].edge.as_ref().expect("non-root edge");
                edge.states[1..].iter().map(|x| self.model.position(x)).collect()
            };
            let robustness = self
                .monitor
                .update(
                    &self.tree.nodes[parent].robustness,
                    edge_states.iter().map(|s| s.as_slice()),
                )
                .expect("stored edge segments are never empty");
            let edge = self.tree.nodes[child].edge.as_ref().unwrap();
            let tltl = self.monitor.edge_cost(&self.tree.nodes[parent].robustness, &robustness);
            let cost = self.tree.nodes[parent].cost_to_come + edge.control_cost + self.mu2 * tltl;
            let arrival = self.tree.nodes[parent].arrival_time + edge.arrival_time;
            {
                let node = &mut self.tree.nodes[child];
                node.cost_to_come = cost;
                node.arrival_time = arrival;
                node.robustness = robustness;
            }
            stack.extend(self.tree.nodes[child].children.iter().copied());
        }
    }

    /// Attempts a direct connection to the goal from the most recent node
    /// when the goal is still unattached and within the near radius.
    fn try_goal_connection(&mut self) {
        if self.tree.goal_id.is_some() {
            return;
        }
        let goal = self.scenario.goal.clone();
        let last = self.tree.nodes.len() - 1;
        if last == 0 {
            return;
        }
        let r = self.near_radius();
        if (&self.tree.nodes[last].state - &goal).norm() >= r {
            return;
        }
        if let Some((edge, rob, cost)) = self.candidate_edge(last, &goal) {
            let id = self.tree.nodes.len();
            let arrival = self.tree.nodes[last].arrival_time + edge.arrival_time;
            self.tree.nodes.push(TreeNode {
                state: goal,
                parent: Some(last),
                children: Vec::new(),
                cost_to_come: cost,
                arrival_time: arrival,
                robustness: rob,
                edge: Some(edge),
            });
            self.tree.nodes[last].children.push(id);
            self.tree.goal_id = Some(id);
        }
    }

    fn record_goal_snapshot(&mut self) {
        let Some(goal_id) = self.tree.goal_id else { return };
        let cost = self.tree.nodes[goal_id].cost_to_come;
        let robustness = self.tree.nodes[goal_id].robustness.root();
        let satisfied = robustness >= 0.0;
        let improves_satisfied = satisfied
            && self.best_satisfied.as_ref().map(|s| cost < s.cost).unwrap_or(true);
        let improves_any = self
            .best_any
            .as_ref()
            .map(|s| (robustness, -cost) > (s.robustness, -s.cost))
            .unwrap_or(true);
        if !(improves_satisfied || improves_any) {
            return;
        }
        let solution = self.extract_solution(goal_id, cost, robustness, satisfied);
        if improves_satisfied {
            self.best_satisfied = Some(GoalSnapshot { cost, robustness, solution: solution.clone() });
        }
        if improves_any {
            self.best_any = Some(GoalSnapshot { cost, robustness, solution });
        }
    }

    /// Concatenates the root-to-goal edges. Junction samples appear once,
    /// carrying the incoming edge's final control.
    fn extract_solution(
        &self,
        goal_id: usize,
        total_cost: f64,
        root_robustness: f64,
        satisfied: bool,
    ) -> Solution {
        let path = self.tree.path_to(goal_id);
        let mut times = vec![0.0];
        let mut states = vec![self.tree.nodes[path[0]].state.clone()];
        let mut controls = vec![DVector::zeros(self.model.input_dim)];
        let mut clock = 0.0;
        for id in path.iter().skip(1) {
            let edge = self.tree.nodes[*id].edge.as_ref().expect("path edge");
            // Overwrite the junction control with the outgoing edge's start.
            *controls.last_mut().unwrap() = edge.controls[0].clone();
            for k in 1..edge.states.len() {
                times.push(clock + k as f64 * edge.dt);
                states.push(edge.states[k].clone());
                controls.push(edge.controls[k].clone());
            }
            clock += edge.arrival_time;
        }
        let max_control_effort = controls
            .iter()
            .flat_map(|u| u.iter().map(|v| v.abs()))
            .fold(0.0, f64::max);
        Solution {
            times,
            states,
            controls,
            total_cost,
            root_robustness,
            satisfied,
            max_control_effort,
        }
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn now() -> std::time::Instant {
    std::time::Instant::now()
}

#[cfg(not(target_arch = "wasm32"))]
fn elapsed(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

// Wall-clock budgets are ignored on wasm; the iteration budget governs.
#[cfg(target_arch = "wasm32")]
fn now() -> f64 {
    0.0
}

#[cfg(target_arch = "wasm32")]
fn elapsed(_start: f64) -> f64 {
    0.0
}
