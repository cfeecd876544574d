//! System models, linearization, and an independent RK4 integrator.
//!
//! Two models ship with the library: a velocity-controlled planar robot
//! (single integrator) and a force-controlled 3-D double integrator with
//! unit mass. Both are exactly linear, so the planner linearizes them once;
//! custom models get central-finite-difference Jacobians about the edge
//! start state.

use std::fmt;
use std::rc::Rc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("state/input outside model bounds at linearization point")]
    LinearizationOutOfBounds,
    #[error("non-finite Jacobian entry while linearizing")]
    NonFiniteJacobian,
    #[error("ODE integration diverged to a non-finite state")]
    Diverged,
    #[error("integration requires positive duration and step")]
    BadTimeStep,
}

/// Axis-aligned box, used for both state and input bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub min: DVector<f64>,
    pub max: DVector<f64>,
}

impl Bounds {
    pub fn new(min: DVector<f64>, max: DVector<f64>) -> Self {
        assert_eq!(min.len(), max.len());
        assert!(min.iter().zip(max.iter()).all(|(a, b)| a < b), "bounds box is empty");
        Bounds { min, max }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.excess(x) == 0.0
    }

    /// Largest componentwise violation, zero when inside.
    pub fn excess(&self, x: &DVector<f64>) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            worst = worst.max(self.min[i] - x[i]).max(x[i] - self.max[i]);
        }
        worst
    }

    pub fn diagonal(&self) -> f64 {
        (&self.max - &self.min).norm()
    }

    pub fn center(&self) -> DVector<f64> {
        (&self.max + &self.min) * 0.5
    }
}

type DriftFn = Rc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>>;

#[derive(Clone)]
enum Dynamics {
    /// `xdot = u`, state = position.
    SingleIntegrator,
    /// `xdot = [v; u/m]` per axis, unit mass, state = [positions; velocities].
    DoubleIntegrator,
    /// User-supplied drift, linearized by finite differences.
    Custom(DriftFn),
}

/// A system model: drift function, bounds, control weight, and the mapping
/// from state coordinates to workspace position coordinates (the leading
/// `position_dim` entries).
#[derive(Clone)]
pub struct SystemModel {
    pub name: String,
    pub state_dim: usize,
    pub input_dim: usize,
    pub position_dim: usize,
    pub state_bounds: Bounds,
    pub input_bounds: Bounds,
    /// Positive-definite control weight R.
    pub control_weight: DMatrix<f64>,
    /// Largest speed the model is expected to sustain; used for arrival-time
    /// search ranges and as the geometric baseline's nominal speed.
    pub max_speed: f64,
    dynamics: Dynamics,
}

impl fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemModel")
            .field("name", &self.name)
            .field("state_dim", &self.state_dim)
            .field("input_dim", &self.input_dim)
            .finish()
    }
}

/// Velocity bound for the shipped ground robot, m/s.
pub const ROBOT_SPEED_LIMIT: f64 = 0.22;
/// Control weight for the robot. With R = w*I the cost-optimal edge cruises
/// at 1/sqrt(w) m/s, so w = 25 keeps optimal edges at 0.2 m/s, inside the
/// 0.22 m/s actuator limit.
pub const ROBOT_CONTROL_WEIGHT: f64 = 25.0;
/// Thrust bound for the shipped UAV model, N.
pub const UAV_THRUST_LIMIT: f64 = 5.0;
/// Velocity box for the UAV state space, m/s. With R = I the optimal
/// rest-to-rest edge peaks near 1 N of thrust, well inside the 5 N limit;
/// the box also bounds sampled velocities, and a tighter box keeps more
/// candidate edges within the thrust limit.
pub const UAV_SPEED_LIMIT: f64 = 0.8;

impl SystemModel {
    /// Planar velocity-controlled robot: state = position in the workspace,
    /// input = commanded velocity.
    pub fn single_integrator_2d(workspace: &Bounds) -> Self {
        assert_eq!(workspace.dim(), 2);
        let m = 2;
        SystemModel {
            name: "single-integrator-2d".into(),
            state_dim: 2,
            input_dim: m,
            position_dim: 2,
            state_bounds: workspace.clone(),
            input_bounds: Bounds::new(
                DVector::from_element(m, -ROBOT_SPEED_LIMIT),
                DVector::from_element(m, ROBOT_SPEED_LIMIT),
            ),
            control_weight: DMatrix::identity(m, m) * ROBOT_CONTROL_WEIGHT,
            max_speed: ROBOT_SPEED_LIMIT,
            dynamics: Dynamics::SingleIntegrator,
        }
    }

    /// 3-D double integrator with unit mass: state = [position; velocity],
    /// input = force.
    pub fn double_integrator_3d(workspace: &Bounds) -> Self {
        assert_eq!(workspace.dim(), 3);
        let mut min = DVector::zeros(6);
        let mut max = DVector::zeros(6);
        for i in 0..3 {
            min[i] = workspace.min[i];
            max[i] = workspace.max[i];
            min[3 + i] = -UAV_SPEED_LIMIT;
            max[3 + i] = UAV_SPEED_LIMIT;
        }
        SystemModel {
            name: "double-integrator-3d".into(),
            state_dim: 6,
            input_dim: 3,
            position_dim: 3,
            state_bounds: Bounds::new(min, max),
            input_bounds: Bounds::new(
                DVector::from_element(3, -UAV_THRUST_LIMIT),
                DVector::from_element(3, UAV_THRUST_LIMIT),
            ),
            control_weight: DMatrix::identity(3, 3),
            max_speed: UAV_SPEED_LIMIT,
            dynamics: Dynamics::DoubleIntegrator,
        }
    }

    /// Model with a user-supplied drift function; linearized numerically.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        position_dim: usize,
        state_bounds: Bounds,
        input_bounds: Bounds,
        control_weight: DMatrix<f64>,
        max_speed: f64,
        drift: impl Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + 'static,
    ) -> Self {
        let state_dim = state_bounds.dim();
        let input_dim = input_bounds.dim();
        assert_eq!(control_weight.nrows(), input_dim);
        assert_eq!(control_weight.ncols(), input_dim);
        SystemModel {
            name: name.into(),
            state_dim,
            input_dim,
            position_dim,
            state_bounds,
            input_bounds,
            control_weight,
            max_speed,
            dynamics: Dynamics::Custom(Rc::new(drift)),
        }
    }

    /// Drift `f(x, u)`.
    pub fn eval(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        match &self.dynamics {
            Dynamics::SingleIntegrator => u.clone(),
            Dynamics::DoubleIntegrator => {
                let half = self.state_dim / 2;
                let mut out = DVector::zeros(self.state_dim);
                for i in 0..half {
                    out[i] = x[half + i];
                    out[half + i] = u[i];
                }
                out
            }
            Dynamics::Custom(f) => f(x, u),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.dynamics, Dynamics::SingleIntegrator | Dynamics::DoubleIntegrator)
    }

    /// Workspace position part of a state.
    pub fn position(&self, x: &DVector<f64>) -> Vec<f64> {
        x.as_slice()[..self.position_dim].to_vec()
    }

    /// First-order Taylor expansion about `(x_op, u_op)`:
    /// `f(x, u) ~ A x + B u + d` with zero residual at the expansion point.
    ///
    /// Shipped models get their exact matrices; custom models use central
    /// finite differences with step 1e-6.
    pub fn linearize(
        &self,
        x_op: &DVector<f64>,
        u_op: &DVector<f64>,
    ) -> Result<LinearizedSystem, DynamicsError> {
        if self.state_bounds.excess(x_op) > 0.0 || self.input_bounds.excess(u_op) > 0.0 {
            return Err(DynamicsError::LinearizationOutOfBounds);
        }
        let (a, b) = match &self.dynamics {
            Dynamics::SingleIntegrator => (
                DMatrix::zeros(self.state_dim, self.state_dim),
                DMatrix::identity(self.input_dim, self.input_dim),
            ),
            Dynamics::DoubleIntegrator => {
                let half = self.state_dim / 2;
                let mut a = DMatrix::zeros(self.state_dim, self.state_dim);
                let mut b = DMatrix::zeros(self.state_dim, self.input_dim);
                for i in 0..half {
                    a[(i, half + i)] = 1.0;
                    b[(half + i, i)] = 1.0;
                }
                (a, b)
            }
            Dynamics::Custom(f) => {
                let h = 1e-6;
                let mut a = DMatrix::zeros(self.state_dim, self.state_dim);
                let mut b = DMatrix::zeros(self.state_dim, self.input_dim);
                for j in 0..self.state_dim {
                    let mut xp = x_op.clone();
                    let mut xm = x_op.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    let col = (f(&xp, u_op) - f(&xm, u_op)) / (2.0 * h);
                    a.set_column(j, &col);
                }
                for j in 0..self.input_dim {
                    let mut up = u_op.clone();
                    let mut um = u_op.clone();
                    up[j] += h;
                    um[j] -= h;
                    let col = (f(x_op, &up) - f(x_op, &um)) / (2.0 * h);
                    b.set_column(j, &col);
                }
                (a, b)
            }
        };
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::NonFiniteJacobian);
        }
        let d = self.eval(x_op, u_op) - &a * x_op - &b * u_op;
        Ok(LinearizedSystem {
            a,
            b,
            d,
            state_bounds: self.state_bounds.clone(),
            input_bounds: self.input_bounds.clone(),
            control_weight: self.control_weight.clone(),
            position_dim: self.position_dim,
            max_speed: self.max_speed,
        })
    }
}

/// Linear approximation `xdot = A x + B u + d` with the bounds and control
/// weight carried over from the source model.
#[derive(Debug, Clone)]
pub struct LinearizedSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub d: DVector<f64>,
    pub state_bounds: Bounds,
    pub input_bounds: Bounds,
    pub control_weight: DMatrix<f64>,
    pub position_dim: usize,
    pub max_speed: f64,
}

impl LinearizedSystem {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn position(&self, x: &DVector<f64>) -> Vec<f64> {
        x.as_slice()[..self.position_dim].to_vec()
    }

    /// Rank check of [B AB ... A^(n-1)B] via singular values.
    pub fn is_controllable(&self) -> bool {
        let n = self.state_dim();
        let m = self.input_dim();
        let mut blocks = DMatrix::zeros(n, n * m);
        let mut power = self.b.clone();
        for k in 0..n {
            blocks.view_mut((0, k * m), (n, m)).copy_from(&power);
            power = &self.a * &power;
        }
        let svd = blocks.svd(false, false);
        let max_sv = svd.singular_values.max();
        let tol = max_sv * 1e-10 * (n as f64);
        svd.singular_values.iter().filter(|s| **s > tol).count() == n
    }
}

/// Result of a box check over sampled states and inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsCheck {
    pub state_excess: f64,
    pub input_excess: f64,
}

impl BoundsCheck {
    pub fn ok(&self) -> bool {
        self.state_excess == 0.0 && self.input_excess == 0.0
    }
}

/// Componentwise box check; returns the worst violation magnitudes
/// (zero when every sample is inside).
pub fn check_bounds(
    sys: &LinearizedSystem,
    states: &[DVector<f64>],
    inputs: &[DVector<f64>],
) -> BoundsCheck {
    assert!(!states.is_empty(), "bounds check over empty samples");
    let state_excess = states.iter().map(|x| sys.state_bounds.excess(x)).fold(0.0, f64::max);
    let input_excess = inputs.iter().map(|u| sys.input_bounds.excess(u)).fold(0.0, f64::max);
    BoundsCheck { state_excess, input_excess }
}

/// Fixed-step classical Runge-Kutta integration of
/// `xdot = A x + B u(t) + d`, sampled every `dt` (the last step is shortened
/// so the final sample lands exactly on `tau`).
///
/// Serves as the independent verification oracle for the closed-form
/// steering trajectories.
pub fn integrate_ode(
    sys: &LinearizedSystem,
    x0: &DVector<f64>,
    u: &dyn Fn(f64) -> DVector<f64>,
    tau: f64,
    dt: f64,
) -> Result<Vec<DVector<f64>>, DynamicsError> {
    if tau <= 0.0 || dt <= 0.0 {
        return Err(DynamicsError::BadTimeStep);
    }
    let steps = (tau / dt).ceil().max(1.0) as usize;
    let h = tau / steps as f64;
    let deriv = |t: f64, x: &DVector<f64>| -> DVector<f64> { &sys.a * x + &sys.b * u(t) + &sys.d };
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    states.push(x.clone());
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = deriv(t, &x);
        let k2 = deriv(t + 0.5 * h, &(&x + &k1 * (0.5 * h)));
        let k3 = deriv(t + 0.5 * h, &(&x + &k2 * (0.5 * h)));
        let k4 = deriv(t + h, &(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::Diverged);
        }
        states.push(x.clone());
    }
    Ok(states)
}
