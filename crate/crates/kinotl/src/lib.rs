//! Kinodynamic motion planning under truncated linear temporal logic.
//!
//! The library grows an RRT*-style tree whose edges are closed-form optimal
//! control trajectories of a linearized system. Edge costs blend control
//! effort and duration with an incrementally monitored robustness measure of
//! a temporal-logic specification, so the returned trajectory both satisfies
//! the specification and respects state and input bounds.
//!
//! The main pieces:
//!
//! - [`logic`] — formula AST, text parser, and the incremental robustness
//!   monitor with its capped-robustness edge cost.
//! - [`dynamics`] — system models (velocity-controlled ground robot,
//!   force-controlled double integrator), linearization, and an RK4
//!   integrator used as a verification oracle.
//! - [`steering`] — fixed-final-state optimal control: weighted
//!   controllability Gramian, free evolution, optimal arrival time, and the
//!   closed-form joint state/costate trajectory.
//! - [`planner`] — the sampling/extend/rewire loop with robustness-state
//!   propagation and collision checking.
//! - [`scenario`] — scenario file schema, validation, and the built-in
//!   benchmark scenarios.
//! - [`baseline`] — a geometric (no kinodynamic constraints) RRT* used for
//!   comparison reports.
//! - [`report`] — trajectory CSV export/import, run reports, comparison
//!   tables.
//! - [`svg`] — deterministic SVG rendering of workspaces, trees, and paths.

pub mod baseline;
pub mod dynamics;
pub mod logic;
pub mod planner;
pub mod report;
pub mod scenario;
pub mod steering;
pub mod svg;
