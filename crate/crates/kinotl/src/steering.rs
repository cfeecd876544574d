//! Fixed-final-state optimal control between sampled states.
//!
//! For the linearized system `xdot = A x + B u + d` the minimum-effort
//! control that drives `x0` to `x1` in time `tau` is
//!
//! ```text
//! u(t) = R^-1 B^T e^{A^T (tau - t)} G(tau)^-1 (x1 - xfree(tau))
//! ```
//!
//! where `G` is the R-weighted controllability Gramian and `xfree` the
//! zero-input response. The arrival time is chosen by locating stationary
//! points of the duration-plus-effort cost
//!
//! ```text
//! c(tau)    = mu1 (tau + r^T G^-1 r),            r = x1 - xfree(tau)
//! cdot(tau) = mu1 (1 - 2 (A x1 + d)^T e - e^T B R^-1 B^T e),   e = G^-1 r
//! ```
//!
//! on a geometric grid, refining each bracketed sign change by bisection.
//! All matrix integrals are evaluated through block matrix exponentials, so
//! edges are closed-form up to the accuracy of `exp`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use thiserror::Error;

use crate::dynamics::{check_bounds, LinearizedSystem};

/// Condition-number ceiling above which a Gramian is treated as singular
/// and the edge rejected rather than regularized.
pub const GRAMIAN_CONDITION_LIMIT: f64 = 1e12;

/// Default spacing of trajectory samples, aligned with the robustness
/// monitor discretization.
pub const DEFAULT_SAMPLE_DT: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SteerError {
    #[error("steering horizon must be nonnegative")]
    NegativeHorizon,
    #[error("controllability Gramian is ill-conditioned (cond ~ {cond:.3e})")]
    IllConditionedGramian { cond: f64 },
    #[error("no finite-cost arrival time in the search range")]
    Unreachable,
    #[error("degenerate steering request: identical endpoints")]
    DegenerateEndpoints,
    #[error("closed-form trajectory failed to reproduce the start state")]
    InaccurateTrajectory,
}

/// Weighted controllability Gramian over `[0, tau]`.
#[derive(Debug, Clone)]
pub struct Gramian {
    pub matrix: DMatrix<f64>,
    pub horizon: f64,
}

/// Search range for the optimal arrival time.
#[derive(Debug, Clone, Copy)]
pub struct TauRange {
    pub min: f64,
    pub max: f64,
    pub grid_points: usize,
}

impl TauRange {
    /// Range sized to the system: up to four crossings of the state-space
    /// diagonal at the model's top speed, probed on a 64-point geometric
    /// grid.
    pub fn for_system(sys: &LinearizedSystem) -> Self {
        let diag = sys.state_bounds.diagonal();
        TauRange { min: 1e-3, max: 4.0 * diag / sys.max_speed, grid_points: 64 }
    }
}

/// One optimal connection between two states.
#[derive(Debug, Clone)]
pub struct SteeringEdge {
    pub from: DVector<f64>,
    pub to: DVector<f64>,
    /// Arrival time of this edge, s.
    pub arrival_time: f64,
    /// Gramian-weighted terminal residual scaled by the duration weight;
    /// the costate satisfies `y(t) = e^{A^T (tau - t)} residual`.
    pub residual: DVector<f64>,
    /// Sample spacing; the grid lands exactly on the endpoint.
    pub dt: f64,
    pub states: Vec<DVector<f64>>,
    pub costates: Vec<DVector<f64>>,
    pub controls: Vec<DVector<f64>>,
    /// `mu1 * tau + (mu1 / 2) * integral of u^T R u`, in closed form.
    pub control_cost: f64,
    pub max_input_excess: f64,
    pub max_state_excess: f64,
    /// Whether the arrival time came from a stationary point of the cost
    /// (as opposed to the grid-minimum fallback).
    pub stationary: bool,
}

impl SteeringEdge {
    pub fn feasible(&self) -> bool {
        self.max_input_excess == 0.0 && self.max_state_excess == 0.0
    }

    /// Effort integral `(1/2) * integral of u^T R u dt` implied by the
    /// stored cost decomposition.
    pub fn effort(&self, mu1: f64) -> f64 {
        self.control_cost / mu1 - self.arrival_time
    }
}

/// Matrix exponential of the Van Loan block `[[-A, B R^-1 B^T], [0, A^T]] tau`
/// yields the Gramian as `(lower right)^T * (upper right)`.
pub fn gramian(sys: &LinearizedSystem, tau: f64) -> Result<Gramian, SteerError> {
    if tau < 0.0 {
        return Err(SteerError::NegativeHorizon);
    }
    let n = sys.state_dim();
    let r_inv = inverse_weight(sys);
    let q = &sys.b * r_inv * sys.b.transpose();
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-&sys.a));
    block.view_mut((0, n), (n, n)).copy_from(&q);
    block.view_mut((n, n), (n, n)).copy_from(&sys.a.transpose());
    let e = (block * tau).exp();
    let upper_right = e.view((0, n), (n, n)).into_owned();
    let lower_right = e.view((n, n), (n, n)).into_owned();
    let mut g = lower_right.transpose() * upper_right;
    // Symmetrize: the construction is symmetric up to rounding.
    g = (&g + g.transpose()) * 0.5;
    Ok(Gramian { matrix: g, horizon: tau })
}

/// Zero-input state response `e^{A tau} x0 + int_0^tau e^{A s} d ds`.
pub fn free_evolution(sys: &LinearizedSystem, x0: &DVector<f64>, tau: f64) -> DVector<f64> {
    let (phi, xi) = transition(sys, tau);
    phi * x0 + xi
}

/// `(e^{A tau}, int_0^tau e^{A(tau-s)} d ds)` via one augmented exponential.
fn transition(sys: &LinearizedSystem, tau: f64) -> (DMatrix<f64>, DVector<f64>) {
    let n = sys.state_dim();
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&sys.a);
    aug.view_mut((0, n), (n, 1)).copy_from(&sys.d);
    let e = (aug * tau).exp();
    let phi = e.view((0, 0), (n, n)).into_owned();
    let xi = DVector::from_fn(n, |i, _| e[(i, n)]);
    (phi, xi)
}

fn inverse_weight(sys: &LinearizedSystem) -> DMatrix<f64> {
    sys.control_weight
        .clone()
        .try_inverse()
        .expect("control weight R must be invertible")
}

/// Per-horizon tables reused across cost evaluations.
struct HorizonTables {
    tau: f64,
    phi: DMatrix<f64>,
    xi: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

/// Evaluation of the arrival-time cost at one horizon.
struct HorizonEval {
    tau: f64,
    cost: f64,
    cost_dot: f64,
}

/// Steering workspace for one linearized system. Precomputes Gramians and
/// transition matrices on the arrival-time grid so repeated planner queries
/// avoid redundant matrix exponentials.
pub struct SteeringContext {
    sys: LinearizedSystem,
    sample_dt: f64,
    r_inv: DMatrix<f64>,
    effort_matrix: DMatrix<f64>, // B R^-1 B^T
    grid: Vec<HorizonTables>,
}

impl SteeringContext {
    pub fn new(sys: LinearizedSystem, range: TauRange, sample_dt: f64) -> Self {
        let r_inv = inverse_weight(&sys);
        let effort_matrix = &sys.b * &r_inv * sys.b.transpose();
        let mut ctx = SteeringContext { sys, sample_dt, r_inv, effort_matrix, grid: Vec::new() };
        let ratio = range.max / range.min;
        for i in 0..range.grid_points {
            let frac = i as f64 / (range.grid_points - 1) as f64;
            let tau = range.min * ratio.powf(frac);
            if let Some(tables) = ctx.tables_at(tau) {
                ctx.grid.push(tables);
            }
        }
        ctx
    }

    pub fn system(&self) -> &LinearizedSystem {
        &self.sys
    }

    pub fn sample_dt(&self) -> f64 {
        self.sample_dt
    }

    fn tables_at(&self, tau: f64) -> Option<HorizonTables> {
        let gram = gramian(&self.sys, tau).ok()?.matrix;
        if condition_number(&gram) > GRAMIAN_CONDITION_LIMIT {
            return None;
        }
        let chol = Cholesky::new(gram)?;
        let (phi, xi) = transition(&self.sys, tau);
        Some(HorizonTables { tau, phi, xi, chol })
    }

    fn eval(&self, tables: &HorizonTables, x0: &DVector<f64>, x1: &DVector<f64>, mu1: f64) -> HorizonEval {
        let xfree = &tables.phi * x0 + &tables.xi;
        let residual = x1 - xfree;
        let e = tables.chol.solve(&residual);
        let quad = residual.dot(&e);
        let drift_at_goal = &self.sys.a * x1 + &self.sys.d;
        let cost_dot = mu1 * (1.0 - 2.0 * drift_at_goal.dot(&e) - (&self.effort_matrix * &e).dot(&e));
        HorizonEval { tau: tables.tau, cost: mu1 * (tables.tau + quad), cost_dot }
    }

    /// Optimal arrival time: stationary points of `cdot` bracketed on the
    /// geometric grid and refined by bisection, choosing the root with the
    /// least cost (ties to the smaller time). Falls back to the grid
    /// minimum when no sign change exists.
    pub fn optimal_arrival_time(
        &self,
        x0: &DVector<f64>,
        x1: &DVector<f64>,
        mu1: f64,
    ) -> Result<(f64, bool), SteerError> {
        if self.grid.is_empty() {
            return Err(SteerError::Unreachable);
        }
        let evals: Vec<HorizonEval> =
            self.grid.iter().map(|t| self.eval(t, x0, x1, mu1)).collect();
        let finite: Vec<&HorizonEval> = evals.iter().filter(|e| e.cost.is_finite()).collect();
        if finite.is_empty() {
            return Err(SteerError::Unreachable);
        }

        let mut roots: Vec<(f64, f64)> = Vec::new(); // (tau, cost)
        for pair in finite.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if lo.cost_dot == 0.0 {
                roots.push((lo.tau, lo.cost));
                continue;
            }
            if lo.cost_dot * hi.cost_dot < 0.0 {
                if let Some(root) = self.bisect(lo.tau, hi.tau, x0, x1, mu1) {
                    roots.push(root);
                }
            }
        }
        if let Some(last) = finite.last() {
            if last.cost_dot == 0.0 {
                roots.push((last.tau, last.cost));
            }
        }

        if roots.is_empty() {
            let best = finite
                .iter()
                .min_by(|a, b| (a.cost, a.tau).partial_cmp(&(b.cost, b.tau)).unwrap())
                .unwrap();
            return Ok((best.tau, false));
        }
        roots.sort_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap());
        Ok((roots[0].0, true))
    }

    fn bisect(
        &self,
        mut lo: f64,
        mut hi: f64,
        x0: &DVector<f64>,
        x1: &DVector<f64>,
        mu1: f64,
    ) -> Option<(f64, f64)> {
        let mut f_lo = self.eval(self.tables_at(lo).as_ref()?, x0, x1, mu1).cost_dot;
        let mut mid_eval: Option<HorizonEval> = None;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let tables = self.tables_at(mid)?;
            let eval = self.eval(&tables, x0, x1, mu1);
            let f_mid = eval.cost_dot;
            mid_eval = Some(eval);
            if f_mid.abs() <= 1e-9 * mu1 || (hi - lo) <= 1e-9 * mid.max(1.0) {
                break;
            }
            if f_lo * f_mid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        mid_eval.map(|e| (e.tau, e.cost))
    }

    /// Optimal edge for a fixed arrival time.
    ///
    /// The trajectory is sampled from the closed-form joint state/costate
    /// system integrated backward from the terminal condition, so the final
    /// sample is exactly `x1`; a start-state mismatch beyond tolerance
    /// indicates an ill-conditioned Gramian and rejects the edge.
    pub fn steer_fixed_time(
        &self,
        x0: &DVector<f64>,
        x1: &DVector<f64>,
        tau: f64,
        mu1: f64,
    ) -> Result<SteeringEdge, SteerError> {
        self.steer_with(x0, x1, tau, mu1, false)
    }

    fn steer_with(
        &self,
        x0: &DVector<f64>,
        x1: &DVector<f64>,
        tau: f64,
        mu1: f64,
        stationary: bool,
    ) -> Result<SteeringEdge, SteerError> {
        if tau <= 0.0 {
            return Err(SteerError::NegativeHorizon);
        }
        let n = self.sys.state_dim();
        let tables = match self.tables_at(tau) {
            Some(t) => t,
            None => {
                let cond = gramian(&self.sys, tau)
                    .map(|g| condition_number(&g.matrix))
                    .unwrap_or(f64::INFINITY);
                return Err(SteerError::IllConditionedGramian { cond });
            }
        };
        let xfree = &tables.phi * x0 + &tables.xi;
        let residual = x1 - xfree;
        let e_tilde = tables.chol.solve(&residual);
        let quad = residual.dot(&e_tilde);

        let steps = (tau / self.sample_dt).ceil().max(1.0) as usize;
        let dt = tau / steps as f64;

        // Joint backward dynamics of [x; y] with constant drift [d; 0]:
        // one augmented exponential per edge, then a matvec per sample.
        let mut aug = DMatrix::zeros(2 * n + 1, 2 * n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&self.sys.a);
        aug.view_mut((0, n), (n, n)).copy_from(&self.effort_matrix);
        aug.view_mut((n, n), (n, n)).copy_from(&(-sys_at(&self.sys)));
        aug.view_mut((0, 2 * n), (n, 1)).copy_from(&self.sys.d);
        let step_back = (aug * (-dt)).exp();

        let mut z = DVector::zeros(2 * n + 1);
        z.rows_mut(0, n).copy_from(x1);
        z.rows_mut(n, n).copy_from(&e_tilde);
        z[2 * n] = 1.0;

        let mut states = vec![DVector::zeros(n); steps + 1];
        let mut costates = vec![DVector::zeros(n); steps + 1];
        for k in (0..=steps).rev() {
            states[k] = z.rows(0, n).into_owned();
            costates[k] = z.rows(n, n).into_owned() * mu1;
            if k > 0 {
                z = &step_back * z;
            }
        }
        let start_err = (&states[0] - x0).norm();
        if start_err > 1e-6 * (1.0 + x0.norm()) {
            return Err(SteerError::InaccurateTrajectory);
        }

        let controls: Vec<DVector<f64>> = costates
            .iter()
            .map(|y| &self.r_inv * (sys_bt(&self.sys) * y) / mu1)
            .collect();

        let check = check_bounds(&self.sys, &states, &controls);
        let control_cost = mu1 * tau + 0.5 * mu1 * quad;

        Ok(SteeringEdge {
            from: x0.clone(),
            to: x1.clone(),
            arrival_time: tau,
            residual: e_tilde * mu1,
            dt,
            states,
            costates,
            controls,
            control_cost,
            max_input_excess: check.input_excess,
            max_state_excess: check.state_excess,
            stationary,
        })
    }

    /// Optimal arrival time followed by fixed-time steering; also runs the
    /// bounds check and records the worst input excess.
    pub fn steer(
        &self,
        x0: &DVector<f64>,
        x1: &DVector<f64>,
        mu1: f64,
    ) -> Result<SteeringEdge, SteerError> {
        if x0 == x1 {
            return Err(SteerError::DegenerateEndpoints);
        }
        let (tau, stationary) = self.optimal_arrival_time(x0, x1, mu1)?;
        self.steer_with(x0, x1, tau, mu1, stationary)
    }
}

fn sys_at(sys: &LinearizedSystem) -> DMatrix<f64> {
    sys.a.transpose()
}

fn sys_bt(sys: &LinearizedSystem) -> DMatrix<f64> {
    sys.b.transpose()
}

/// One-shot steering with the default range and sampling.
pub fn steer(
    sys: &LinearizedSystem,
    x0: &DVector<f64>,
    x1: &DVector<f64>,
    mu1: f64,
) -> Result<SteeringEdge, SteerError> {
    let range = TauRange::for_system(sys);
    SteeringContext::new(sys.clone(), range, DEFAULT_SAMPLE_DT).steer(x0, x1, mu1)
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Bounds;
    use nalgebra::{dmatrix, dvector};

    /// Per-axis double integrator with unit weight, generous bounds.
    fn double_integrator_axis() -> LinearizedSystem {
        LinearizedSystem {
            a: dmatrix![0.0, 1.0; 0.0, 0.0],
            b: dmatrix![0.0; 1.0],
            d: dvector![0.0, 0.0],
            state_bounds: Bounds::new(dvector![-100.0, -100.0], dvector![100.0, 100.0]),
            input_bounds: Bounds::new(dvector![-100.0], dvector![100.0]),
            control_weight: dmatrix![1.0],
            position_dim: 1,
            max_speed: 1.0,
        }
    }

    /// Planar single integrator with identity weight.
    fn single_integrator_unit() -> LinearizedSystem {
        LinearizedSystem {
            a: DMatrix::zeros(2, 2),
            b: DMatrix::identity(2, 2),
            d: dvector![0.0, 0.0],
            state_bounds: Bounds::new(dvector![-100.0, -100.0], dvector![100.0, 100.0]),
            input_bounds: Bounds::new(dvector![-100.0, -100.0], dvector![100.0, 100.0]),
            control_weight: DMatrix::identity(2, 2),
            position_dim: 2,
            max_speed: 1.0,
        }
    }

    #[test]
    fn gramian_double_integrator_closed_form() {
        let sys = double_integrator_axis();
        let g = gramian(&sys, 2.0).unwrap().matrix;
        let expected = dmatrix![8.0 / 3.0, 2.0; 2.0, 2.0];
        assert!((g - expected).norm() < 1e-9);
    }

    #[test]
    fn gramian_zero_horizon_is_zero() {
        let sys = double_integrator_axis();
        let g = gramian(&sys, 0.0).unwrap().matrix;
        assert!(g.norm() < 1e-15);
        assert!(gramian(&sys, -1.0).is_err());
    }

    #[test]
    fn gramian_driftless_identity_system() {
        let sys = single_integrator_unit();
        let g = gramian(&sys, 3.0).unwrap().matrix;
        assert!((g - DMatrix::identity(2, 2) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn free_evolution_cases() {
        let mut sys = single_integrator_unit();
        let x0 = dvector![1.0, -2.0];
        assert!((free_evolution(&sys, &x0, 5.0) - &x0).norm() < 1e-12);
        sys.d = dvector![0.5, 1.0];
        assert!((free_evolution(&sys, &x0, 2.0) - dvector![2.0, 0.0]).norm() < 1e-12);

        let di = double_integrator_axis();
        let x = free_evolution(&di, &dvector![1.0, 1.0], 2.0);
        assert!((x - dvector![3.0, 1.0]).norm() < 1e-12);
    }

    #[test]
    fn fixed_time_rest_to_rest_is_cubic() {
        let sys = double_integrator_axis();
        let ctx = SteeringContext::new(sys, TauRange { min: 1e-3, max: 10.0, grid_points: 64 }, 0.05);
        let edge = ctx
            .steer_fixed_time(&dvector![0.0, 0.0], &dvector![1.0, 0.0], 1.0, 1.0)
            .unwrap();
        // u(t) = 6 - 12 t
        for (k, u) in edge.controls.iter().enumerate() {
            let t = k as f64 * edge.dt;
            assert!((u[0] - (6.0 - 12.0 * t)).abs() < 1e-6, "t={t} u={}", u[0]);
        }
        // effort integral = 6, stored cost = mu1 * (tau + effort)
        assert!((edge.effort(1.0) - 6.0).abs() < 1e-9);
        assert!((edge.control_cost - 7.0).abs() < 1e-9);
        // endpoints exact
        assert!((edge.states.last().unwrap() - dvector![1.0, 0.0]).norm() < 1e-12);
        assert!((edge.states.first().unwrap() - dvector![0.0, 0.0]).norm() < 1e-9);
    }

    #[test]
    fn zero_residual_edge_costs_duration_only() {
        let sys = double_integrator_axis();
        let ctx = SteeringContext::new(sys.clone(), TauRange { min: 1e-3, max: 10.0, grid_points: 64 }, 0.05);
        let x0 = dvector![1.0, 1.0];
        let x1 = free_evolution(&sys, &x0, 2.0);
        let edge = ctx.steer_fixed_time(&x0, &x1, 2.0, 1.0).unwrap();
        assert!(edge.effort(1.0).abs() < 1e-9);
        for u in &edge.controls {
            assert!(u.norm() < 1e-7);
        }
    }

    #[test]
    fn arrival_time_single_integrator_distance_law() {
        let sys = single_integrator_unit();
        let ctx = SteeringContext::new(sys, TauRange { min: 1e-3, max: 50.0, grid_points: 64 }, 0.05);
        for delta in [0.3, 1.0, 2.5] {
            let (tau, stationary) = ctx
                .optimal_arrival_time(&dvector![0.0, 0.0], &dvector![delta, 0.0], 1.0)
                .unwrap();
            assert!(stationary);
            assert!((tau - delta).abs() <= 1e-6 * delta, "delta={delta} tau={tau}");
        }
    }

    #[test]
    fn arrival_time_double_integrator_matches_grid_oracle() {
        // Rest-to-rest over unit distance: c(tau) = tau + 12/tau^3, whose
        // stationary point is 36^(1/4).
        let sys = double_integrator_axis();
        let ctx = SteeringContext::new(sys, TauRange { min: 1e-3, max: 40.0, grid_points: 64 }, 0.05);
        let (tau, stationary) = ctx
            .optimal_arrival_time(&dvector![0.0, 0.0], &dvector![1.0, 0.0], 1.0)
            .unwrap();
        assert!(stationary);
        let expected = 36.0f64.powf(0.25);
        assert!((tau - expected).abs() < 1e-6 * expected, "tau={tau} expected={expected}");

        // Dense-grid oracle over the same cost.
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..40_000 {
            let t = i as f64 * 1e-3;
            let c = t + 12.0 / t.powi(3);
            if c < best.0 {
                best = (c, t);
            }
        }
        assert!((tau - best.1).abs() < 2e-3);
    }

    #[test]
    fn steer_rejects_identical_endpoints() {
        let sys = single_integrator_unit();
        let ctx = SteeringContext::new(sys, TauRange { min: 1e-3, max: 10.0, grid_points: 32 }, 0.05);
        let x = dvector![1.0, 1.0];
        assert!(matches!(ctx.steer(&x, &x, 1.0), Err(SteerError::DegenerateEndpoints)));
    }

    #[test]
    fn steer_flags_input_excess_against_tight_bounds() {
        // Unit-weight single integrator travels at 1 m/s along the optimal
        // edge; a 0.22 m/s actuator cannot follow it.
        let mut sys = single_integrator_unit();
        sys.input_bounds = Bounds::new(dvector![-0.22, -0.22], dvector![0.22, 0.22]);
        let ctx = SteeringContext::new(sys, TauRange { min: 1e-3, max: 50.0, grid_points: 64 }, 0.05);
        let edge = ctx.steer(&dvector![0.0, 0.0], &dvector![1.0, 0.0], 1.0).unwrap();
        assert!((edge.arrival_time - 1.0).abs() < 1e-6);
        assert!(edge.max_input_excess > 0.7 && edge.max_input_excess < 0.8);
        assert!(!edge.feasible());
    }

    #[test]
    fn shipped_robot_weight_keeps_edges_inside_speed_limit() {
        use crate::dynamics::SystemModel;
        let workspace = Bounds::new(dvector![0.0, 0.0], dvector![6.0, 6.0]);
        let model = SystemModel::single_integrator_2d(&workspace);
        let sys = model.linearize(&dvector![1.0, 1.0], &dvector![0.0, 0.0]).unwrap();
        let ctx = SteeringContext::new(sys, TauRange::for_system(&model.linearize(&dvector![1.0, 1.0], &dvector![0.0, 0.0]).unwrap()), 0.05);
        let edge = ctx.steer(&dvector![1.0, 1.0], &dvector![2.0, 2.0], 1.0).unwrap();
        assert_eq!(edge.max_input_excess, 0.0, "edge speed {:?}", edge.controls[0]);
        // Optimal cruise speed for R = 25 I is 0.2 m/s.
        assert!((edge.controls[0].norm() - 0.2).abs() < 1e-6);
    }
}
