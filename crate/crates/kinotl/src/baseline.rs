//! Geometric RRT* baseline: straight-line edges, no kinodynamic
//! constraints.
//!
//! Edges are priced by traversal time at the model's nominal speed plus the
//! specification cost, and no input-bound rejection happens anywhere. After
//! planning, the implied control signal is reconstructed by tracking the
//! constant-speed reference with one sample of reaction delay: the tracker
//! extrapolates along the current segment direction and discovers corners a
//! step late, so the catch-up command at sharp turns exceeds the segment
//! speed. On a straight course the implied command equals the nominal speed
//! exactly.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::logic::{CompiledFormula, RobustnessState};
use crate::planner::{PlanError, PlanStats, GOAL_BIAS};
use crate::scenario::Scenario;

struct BaselineNode {
    position: DVector<f64>,
    parent: Option<usize>,
    children: Vec<usize>,
    cost: f64,
    robustness: RobustnessState,
    /// Sampled positions of the incoming segment, endpoint inclusive.
    segment: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub times: Vec<f64>,
    pub positions: Vec<DVector<f64>>,
    /// Implied model inputs reconstructed from the final path.
    pub controls: Vec<DVector<f64>>,
    pub total_cost: f64,
    pub root_robustness: f64,
    pub satisfied: bool,
    pub max_control_effort: f64,
    pub stats: PlanStats,
    /// Straight tree edges for rendering.
    pub tree_edges: Vec<(DVector<f64>, DVector<f64>)>,
}

/// Runs the geometric baseline on a scenario, reusing its seed, budget, and
/// weights.
pub fn plan_baseline(scenario: &Scenario) -> Result<BaselineResult, PlanError> {
    scenario.validate()?;
    let model = scenario.model()?;
    let formula = scenario.formula()?;
    let monitor = CompiledFormula::compile(&formula, scenario.rho_max());
    let v_nom = model.max_speed;
    let dt = scenario.sample_dt;
    let dim = model.position_dim;
    let start = model.position(&scenario.start);
    let goal = model.position(&scenario.goal);
    let start = DVector::from_vec(start);
    let goal = DVector::from_vec(goal);

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut stats = PlanStats::default();
    let t0 = std::time::Instant::now();

    let root = BaselineNode {
        position: start.clone(),
        parent: None,
        children: Vec::new(),
        cost: 0.0,
        robustness: monitor.init(start.as_slice())?,
        segment: vec![start.clone()],
    };
    let mut nodes = vec![root];
    let mut goal_id: Option<usize> = None;
    // (cost, robustness, waypoints) of the best satisfied / best overall path.
    let mut best_sat: Option<(f64, f64, Vec<DVector<f64>>)> = None;
    let mut best_any: Option<(f64, f64, Vec<DVector<f64>>)> = None;

    let diag = scenario.workspace.diagonal();
    let gamma = 2.0 * diag;
    let r_cap = diag / 4.0;
    let mu1 = scenario.weights.control;
    let mu2 = scenario.weights.robustness;

    let sample_step = v_nom * dt;

    let segment_samples = |a: &DVector<f64>, b: &DVector<f64>| -> Vec<DVector<f64>> {
        let len = (b - a).norm();
        let n = (len / sample_step).ceil().max(1.0) as usize;
        (1..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()
    };
    let segment_free = |samples: &[DVector<f64>]| -> bool {
        samples.iter().all(|p| scenario.position_free(p.as_slice()))
    };

    for iteration in 0..scenario.budget.iterations {
        stats.iterations = iteration + 1;
        if let Some(limit) = scenario.budget.time_seconds {
            if t0.elapsed().as_secs_f64() > limit {
                break;
            }
        }
        // Sample free position, goal-biased.
        let sample = if rng.gen_bool(GOAL_BIAS) {
            goal.clone()
        } else {
            let mut found = None;
            for _ in 0..10_000 {
                let p = DVector::from_fn(dim, |i, _| {
                    rng.gen_range(scenario.workspace.min[i]..scenario.workspace.max[i])
                });
                if scenario.position_free(p.as_slice()) {
                    found = Some(p);
                    break;
                }
                stats.rejected_samples += 1;
            }
            match found {
                Some(p) => p,
                None => return Err(PlanError::WorkspaceSaturated),
            }
        };
        if goal_id.is_some() && sample == goal {
            continue;
        }

        // Candidate parents: shrinking-radius near set, nearest fallback.
        let n = nodes.len() as f64;
        let radius =
            (gamma * ((n + 1.0).ln() / (n + 1.0)).powf(1.0 / dim as f64)).min(r_cap);
        let mut near: Vec<usize> = (0..nodes.len())
            .filter(|i| (&nodes[*i].position - &sample).norm() < radius)
            .collect();
        if near.is_empty() {
            near.push(
                (0..nodes.len())
                    .map(|i| ((&nodes[i].position - &sample).norm(), i))
                    .min_by(|a, b| a.partial_cmp(b).unwrap())
                    .unwrap()
                    .1,
            );
        }

        let mut chosen: Option<(f64, usize, Vec<DVector<f64>>, RobustnessState)> = None;
        for &pid in &near {
            if nodes[pid].position == sample {
                continue;
            }
            let samples = segment_samples(&nodes[pid].position, &sample);
            if !segment_free(&samples) {
                stats.rejected_edges += 1;
                continue;
            }
            let rob = monitor
                .update(&nodes[pid].robustness, samples.iter().map(|p| p.as_slice()))
                .expect("segment is nonempty");
            let len = (&sample - &nodes[pid].position).norm();
            let cost = nodes[pid].cost
                + mu1 * (len / v_nom)
                + mu2 * monitor.edge_cost(&nodes[pid].robustness, &rob);
            if chosen.as_ref().map(|(c, ..)| cost < *c).unwrap_or(true) {
                chosen = Some((cost, pid, samples, rob));
            }
        }
        let Some((cost, pid, samples, rob)) = chosen else { continue };
        let id = nodes.len();
        nodes.push(BaselineNode {
            position: sample.clone(),
            parent: Some(pid),
            children: Vec::new(),
            cost,
            robustness: rob,
            segment: samples,
        });
        nodes[pid].children.push(id);
        if sample == goal {
            goal_id = Some(id);
        }

        // Rewire near nodes through the new one on strict improvement.
        for &target in &near {
            if target == 0 || target == id {
                continue;
            }
            let mut ancestor = nodes[id].parent;
            let mut target_is_ancestor = false;
            while let Some(a) = ancestor {
                if a == target {
                    target_is_ancestor = true;
                    break;
                }
                ancestor = nodes[a].parent;
            }
            if target_is_ancestor {
                continue;
            }
            let samples = segment_samples(&nodes[id].position, &nodes[target].position);
            if !segment_free(&samples) {
                continue;
            }
            let rob = monitor
                .update(&nodes[id].robustness, samples.iter().map(|p| p.as_slice()))
                .expect("segment is nonempty");
            let len = (&nodes[target].position - &nodes[id].position).norm();
            let cost = nodes[id].cost
                + mu1 * (len / v_nom)
                + mu2 * monitor.edge_cost(&nodes[id].robustness, &rob);
            if cost < nodes[target].cost {
                let old_parent = nodes[target].parent.unwrap();
                let at = nodes[old_parent].children.iter().position(|c| *c == target).unwrap();
                nodes[old_parent].children.remove(at);
                nodes[target].parent = Some(id);
                nodes[target].cost = cost;
                nodes[target].robustness = rob;
                nodes[target].segment = samples;
                nodes[id].children.push(target);
                // Push updates down the subtree.
                let mut stack = nodes[target].children.clone();
                while let Some(child) = stack.pop() {
                    let parent = nodes[child].parent.unwrap();
                    let rob = monitor
                        .update(
                            &nodes[parent].robustness,
                            nodes[child].segment.iter().map(|p| p.as_slice()),
                        )
                        .expect("segment is nonempty");
                    let len = (&nodes[child].position - &nodes[parent].position).norm();
                    nodes[child].cost = nodes[parent].cost
                        + mu1 * (len / v_nom)
                        + mu2 * monitor.edge_cost(&nodes[parent].robustness, &rob);
                    nodes[child].robustness = rob;
                    stack.extend(nodes[child].children.iter().copied());
                }
            }
        }

        // Direct goal connection attempt while unattached.
        if goal_id.is_none() && (&nodes[id].position - &goal).norm() < radius {
            let samples = segment_samples(&nodes[id].position, &goal);
            if segment_free(&samples) {
                let rob = monitor
                    .update(&nodes[id].robustness, samples.iter().map(|p| p.as_slice()))
                    .expect("segment is nonempty");
                let len = (&goal - &nodes[id].position).norm();
                let cost = nodes[id].cost
                    + mu1 * (len / v_nom)
                    + mu2 * monitor.edge_cost(&nodes[id].robustness, &rob);
                let gid = nodes.len();
                nodes.push(BaselineNode {
                    position: goal.clone(),
                    parent: Some(id),
                    children: Vec::new(),
                    cost,
                    robustness: rob,
                    segment: samples,
                });
                nodes[id].children.push(gid);
                goal_id = Some(gid);
            }
        }

        if let Some(gid) = goal_id {
            let rob = nodes[gid].robustness.root();
            let cost = nodes[gid].cost;
            let improves_sat =
                rob >= 0.0 && best_sat.as_ref().map(|(c, ..)| cost < *c).unwrap_or(true);
            let improves_any = best_any
                .as_ref()
                .map(|(c, r, _)| (rob, -cost) > (*r, -*c))
                .unwrap_or(true);
            if improves_sat || improves_any {
                // Materialize waypoints now; later rewiring may change the path.
                let mut ids = vec![gid];
                let mut cursor = gid;
                while let Some(p) = nodes[cursor].parent {
                    ids.push(p);
                    cursor = p;
                }
                ids.reverse();
                let waypoints: Vec<DVector<f64>> =
                    ids.iter().map(|id| nodes[*id].position.clone()).collect();
                if improves_sat {
                    best_sat = Some((cost, rob, waypoints.clone()));
                }
                if improves_any {
                    best_any = Some((cost, rob, waypoints));
                }
            }
        }
    }

    stats.nodes = nodes.len();
    stats.wall_time = t0.elapsed().as_secs_f64();

    let tree_edges = nodes
        .iter()
        .filter_map(|n| {
            n.parent
                .map(|p| (nodes[p].position.clone(), n.position.clone()))
        })
        .collect();

    let Some((cost, rob, waypoints)) = best_sat.or(best_any) else {
        return Ok(BaselineResult {
            times: Vec::new(),
            positions: Vec::new(),
            controls: Vec::new(),
            total_cost: f64::INFINITY,
            root_robustness: f64::NEG_INFINITY,
            satisfied: false,
            max_control_effort: 0.0,
            stats,
            tree_edges,
        });
    };

    // Resample the final polyline at dt along the nominal-speed timing and
    // reconstruct the implied inputs.
    let (times, positions, directions) = resample_polyline(&waypoints, v_nom, dt);
    let force_input = model.state_dim > model.position_dim;
    let controls = implied_controls(&positions, &directions, v_nom, dt, force_input);
    let max_control_effort = controls
        .iter()
        .flat_map(|u| u.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);

    Ok(BaselineResult {
        times,
        positions,
        controls,
        total_cost: cost,
        root_robustness: rob,
        satisfied: rob >= 0.0,
        max_control_effort,
        stats,
        tree_edges,
    })
}

/// Walks the polyline at constant speed, emitting a sample every `dt`,
/// together with the unit direction of the segment each sample lies on.
fn resample_polyline(
    waypoints: &[DVector<f64>],
    v_nom: f64,
    dt: f64,
) -> (Vec<f64>, Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let dim = waypoints[0].len();
    let mut cumulative = vec![0.0];
    for pair in waypoints.windows(2) {
        let len = (&pair[1] - &pair[0]).norm();
        cumulative.push(cumulative.last().unwrap() + len);
    }
    let total_len = *cumulative.last().unwrap();
    let total_time = total_len / v_nom;
    let steps = (total_time / dt).ceil().max(1.0) as usize;

    let mut times = Vec::with_capacity(steps + 1);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut directions = Vec::with_capacity(steps + 1);
    let mut seg = 0usize;
    for k in 0..=steps {
        let t = (k as f64 * dt).min(total_time);
        let arc = t * v_nom;
        while seg + 2 < cumulative.len() && cumulative[seg + 1] < arc {
            seg += 1;
        }
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let alpha = if seg_len > 0.0 { (arc - cumulative[seg]) / seg_len } else { 0.0 };
        let p = &waypoints[seg] + (&waypoints[seg + 1] - &waypoints[seg]) * alpha;
        let dir = if seg_len > 0.0 {
            (&waypoints[seg + 1] - &waypoints[seg]) / seg_len
        } else {
            DVector::zeros(dim)
        };
        times.push(t);
        samples.push(p);
        directions.push(dir);
    }
    (times, samples, directions)
}

/// One-step-lagged tracking of the resampled reference.
///
/// Velocity-input models: the command extrapolates the current segment and
/// corrects last step's miss, `u_k = v_seg(k) + (r_k - x_k)/dt`. Force-input
/// models close a second loop over velocity with the same delay. Commands
/// are deliberately unclamped.
fn implied_controls(
    reference: &[DVector<f64>],
    directions: &[DVector<f64>],
    v_nom: f64,
    dt: f64,
    force_input: bool,
) -> Vec<DVector<f64>> {
    let dim = reference[0].len();
    let mut controls = Vec::with_capacity(reference.len());
    if !force_input {
        let mut x = reference[0].clone();
        for (r, dir) in reference.iter().zip(directions) {
            let u = dir * v_nom + (r - &x) / dt;
            x += &u * dt;
            controls.push(u);
        }
    } else {
        let mut x = reference[0].clone();
        let mut v = DVector::zeros(dim);
        for (r, dir) in reference.iter().zip(directions) {
            let v_demand = dir * v_nom + (r - &x) / dt;
            let u = (&v_demand - &v) / dt;
            x += &v * dt + &u * (0.5 * dt * dt);
            v += &u * dt;
            controls.push(u);
        }
    }
    controls
}
