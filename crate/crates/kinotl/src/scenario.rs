//! Scenario definition, validation, and the built-in benchmark scenarios.
//!
//! Scenarios are human-editable TOML with sections `[workspace]`,
//! `[[region]]`, `[weights]`, and `[budget]`; numbers are SI units. The
//! schema is versioned through `schema_version`. Region coordinates for the
//! built-ins are named constants chosen to lay out plausible courses;
//! downstream checks rely only on relational properties (regions visited or
//! avoided), never on absolute coordinates.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Bounds, SystemModel};
use crate::logic::{parse_formula, Formula, LogicError, RegionTable};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("unknown model `{0}` (scenario files support single-integrator-2d and double-integrator-3d; custom models are constructed through the API)")]
    UnknownModel(String),
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error(transparent)]
    Formula(#[from] LogicError),
}

/// Cost weighting: `control` scales duration-plus-effort, `robustness`
/// scales the specification cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub control: f64,
    pub robustness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_seconds: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionRole {
    Target,
    Obstacle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub role: RegionRole,
    pub center: DVector<f64>,
    pub halfwidths: DVector<f64>,
}

impl Region {
    /// Closed-box membership of a workspace point.
    pub fn contains_closed(&self, p: &[f64]) -> bool {
        self.contains_inflated(p, 0.0)
    }

    /// Closed-box membership with a margin added to every halfwidth.
    pub fn contains_inflated(&self, p: &[f64], margin: f64) -> bool {
        p.iter()
            .zip(self.center.iter().zip(self.halfwidths.iter()))
            .all(|(x, (c, h))| (x - c).abs() <= *h + margin)
    }
}

/// A fully validated planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model_name: String,
    pub workspace: Bounds,
    pub regions: Vec<Region>,
    pub formula_text: String,
    /// Full start state (velocities zero-filled when the file gives only a
    /// position).
    pub start: DVector<f64>,
    pub goal: DVector<f64>,
    pub weights: Weights,
    pub budget: Budget,
    pub seed: u64,
    pub sample_dt: f64,
    /// Margin added to every obstacle box during free-space tests
    /// (0 = exact boxes).
    pub obstacle_inflation: f64,
}

// --- file schema -----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    schema_version: u32,
    name: String,
    model: String,
    formula: String,
    start: Vec<f64>,
    goal: Vec<f64>,
    seed: u64,
    #[serde(default = "default_sample_dt")]
    sample_dt: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    obstacle_inflation: f64,
    workspace: WorkspaceFile,
    #[serde(default, rename = "region")]
    regions: Vec<RegionFile>,
    weights: Weights,
    budget: Budget,
}

fn default_sample_dt() -> f64 {
    0.05
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Serialize, Deserialize)]
struct WorkspaceFile {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RegionFile {
    name: String,
    role: RegionRole,
    center: Vec<f64>,
    halfwidths: Vec<f64>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion(file.schema_version));
        }
        let workspace = Bounds::new(
            DVector::from_vec(file.workspace.min),
            DVector::from_vec(file.workspace.max),
        );
        let regions = file
            .regions
            .into_iter()
            .map(|r| Region {
                name: r.name,
                role: r.role,
                center: DVector::from_vec(r.center),
                halfwidths: DVector::from_vec(r.halfwidths),
            })
            .collect();
        let mut scenario = Scenario {
            name: file.name,
            model_name: file.model,
            workspace,
            regions,
            formula_text: file.formula,
            start: DVector::from_vec(file.start),
            goal: DVector::from_vec(file.goal),
            weights: file.weights,
            budget: file.budget,
            seed: file.seed,
            sample_dt: file.sample_dt,
            obstacle_inflation: file.obstacle_inflation,
        };
        scenario.pad_states()?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
        Scenario::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        let file = ScenarioFile {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            model: self.model_name.clone(),
            formula: self.formula_text.clone(),
            start: self.start.iter().copied().collect(),
            goal: self.goal.iter().copied().collect(),
            seed: self.seed,
            sample_dt: self.sample_dt,
            obstacle_inflation: self.obstacle_inflation,
            workspace: WorkspaceFile {
                min: self.workspace.min.iter().copied().collect(),
                max: self.workspace.max.iter().copied().collect(),
            },
            regions: self
                .regions
                .iter()
                .map(|r| RegionFile {
                    name: r.name.clone(),
                    role: r.role,
                    center: r.center.iter().copied().collect(),
                    halfwidths: r.halfwidths.iter().copied().collect(),
                })
                .collect(),
            weights: self.weights,
            budget: self.budget,
        };
        toml::to_string_pretty(&file).expect("scenario serialization cannot fail")
    }

    /// Builds the system model for this scenario's workspace.
    pub fn model(&self) -> Result<SystemModel, ScenarioError> {
        match self.model_name.as_str() {
            "single-integrator-2d" => Ok(SystemModel::single_integrator_2d(&self.workspace)),
            "double-integrator-3d" => Ok(SystemModel::double_integrator_3d(&self.workspace)),
            other => Err(ScenarioError::UnknownModel(other.to_string())),
        }
    }

    pub fn region_table(&self) -> RegionTable {
        self.regions
            .iter()
            .map(|r| (r.name.clone(), (r.center.clone(), r.halfwidths.clone())))
            .collect()
    }

    /// Parses the formula against this scenario's regions (negation normal
    /// form).
    pub fn formula(&self) -> Result<Formula, ScenarioError> {
        Ok(parse_formula(&self.formula_text, &self.region_table())?)
    }

    /// Robustness scale for the `true` literal: the workspace diagonal.
    pub fn rho_max(&self) -> f64 {
        self.workspace.diagonal()
    }

    pub fn obstacles(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.role == RegionRole::Obstacle)
    }

    pub fn targets(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.role == RegionRole::Target)
    }

    /// True when the workspace point is inside the bounds and outside every
    /// (closed, possibly inflated) obstacle box.
    pub fn position_free(&self, p: &[f64]) -> bool {
        let inside = p
            .iter()
            .enumerate()
            .all(|(i, x)| *x >= self.workspace.min[i] && *x <= self.workspace.max[i]);
        inside && !self.obstacles().any(|o| o.contains_inflated(p, self.obstacle_inflation))
    }

    /// Zero-fills velocity components when start/goal were given as bare
    /// positions.
    fn pad_states(&mut self) -> Result<(), ScenarioError> {
        let model = self.model()?;
        for state in [&mut self.start, &mut self.goal] {
            if state.len() == model.position_dim && model.state_dim > model.position_dim {
                let mut full = DVector::zeros(model.state_dim);
                full.rows_mut(0, model.position_dim).copy_from(state);
                *state = full;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |msg: String| Err(ScenarioError::Invalid(msg));
        let model = self.model()?;
        let dim = self.workspace.dim();
        if model.position_dim != dim {
            return invalid(format!(
                "model expects a {}-dimensional workspace, file has {dim}",
                model.position_dim
            ));
        }
        if self.weights.control <= 0.0 || self.weights.robustness <= 0.0 {
            return invalid("weights must be positive".into());
        }
        if self.sample_dt <= 0.0 {
            return invalid("sample_dt must be positive".into());
        }
        if self.budget.iterations == 0 {
            return invalid("budget.iterations must be at least 1".into());
        }
        if self.obstacle_inflation < 0.0 {
            return invalid("obstacle_inflation must be nonnegative".into());
        }
        let mut names = BTreeSet::new();
        for region in &self.regions {
            if region.center.len() != dim || region.halfwidths.len() != dim {
                return invalid(format!("region {} has wrong dimension", region.name));
            }
            if region.halfwidths.iter().any(|h| *h <= 0.0) {
                return invalid(format!("region {} has nonpositive halfwidths", region.name));
            }
            if !names.insert(region.name.clone()) {
                return invalid(format!("duplicate region name {}", region.name));
            }
            let disjoint = (0..dim).any(|i| {
                region.center[i] - region.halfwidths[i] > self.workspace.max[i]
                    || region.center[i] + region.halfwidths[i] < self.workspace.min[i]
            });
            if disjoint {
                return invalid(format!(
                    "region {} does not intersect the workspace",
                    region.name
                ));
            }
        }
        for (label, state) in [("start", &self.start), ("goal", &self.goal)] {
            if state.len() != model.state_dim {
                return invalid(format!(
                    "{label} state has dimension {}, model expects {}",
                    state.len(),
                    model.state_dim
                ));
            }
            if model.state_bounds.excess(state) > 0.0 {
                return invalid(format!("{label} state lies outside the state bounds"));
            }
            let position = model.position(state);
            if !self.position_free(&position) {
                return invalid(format!("{label} position is not in free space"));
            }
        }
        // Formula must parse and may only reference declared regions.
        self.formula()?;
        Ok(())
    }
}

// --- built-ins --------------------------------------------------------------

/// Planar robot course: reach T1, then either T2 or T3, while avoiding
/// O1-O3. T2 sits just off the start-goal diagonal, T3 far down-range, so
/// the cheaper disjunct is T2.
const PSI1: &str = r#"
schema_version = 1
name = "psi1"
model = "single-integrator-2d"
formula = "F in(T1) & F (in(T2) | in(T3)) & G (!in(O1) & !in(O2) & !in(O3))"
start = [0.1, 0.1]
goal = [5.5, 5.5]
seed = 7

[workspace]
min = [0.0, 0.0]
max = [6.0, 6.0]

[[region]]
name = "T1"
role = "target"
center = [1.5, 1.5]
halfwidths = [0.5, 0.5]

[[region]]
name = "T2"
role = "target"
center = [2.0, 4.5]
halfwidths = [0.45, 0.45]

[[region]]
name = "T3"
role = "target"
center = [5.0, 0.8]
halfwidths = [0.45, 0.45]

[[region]]
name = "O1"
role = "obstacle"
center = [2.9, 2.9]
halfwidths = [0.4, 0.4]

[[region]]
name = "O2"
role = "obstacle"
center = [1.2, 3.2]
halfwidths = [0.4, 0.4]

[[region]]
name = "O3"
role = "obstacle"
center = [4.2, 1.9]
halfwidths = [0.4, 0.4]

[weights]
control = 1.0
robustness = 10.0

[budget]
iterations = 2000
"#;

/// Relocated T3 for the adaptive-disjunct variant: next to the goal
/// corridor, flipping the cheaper disjunct from T2 to T3.
const PSI1_MOVED_T3_CENTER: [f64; 2] = [4.4, 4.6];

/// Recurrent visit of T1 plus one-shot visits of T2 and T3 under obstacle
/// avoidance, heading to a low goal.
const PSI2: &str = r#"
schema_version = 1
name = "psi2"
model = "single-integrator-2d"
formula = "G (F in(T1)) & F in(T2) & F in(T3) & G (!in(O1) & !in(O2) & !in(O3))"
start = [0.1, 0.1]
goal = [5.5, 1.5]
seed = 11

[workspace]
min = [0.0, 0.0]
max = [6.0, 6.0]

[[region]]
name = "T1"
role = "target"
center = [2.8, 1.2]
halfwidths = [0.5, 0.5]

[[region]]
name = "T2"
role = "target"
center = [1.2, 4.0]
halfwidths = [0.45, 0.45]

[[region]]
name = "T3"
role = "target"
center = [4.6, 3.6]
halfwidths = [0.45, 0.45]

[[region]]
name = "O1"
role = "obstacle"
center = [1.8, 2.4]
halfwidths = [0.4, 0.4]

[[region]]
name = "O2"
role = "obstacle"
center = [3.4, 2.4]
halfwidths = [0.4, 0.4]

[[region]]
name = "O3"
role = "obstacle"
center = [3.0, 4.4]
halfwidths = [0.35, 0.35]

[weights]
control = 1.0
robustness = 10.0

[budget]
iterations = 2000
"#;

/// UAV tour of five target boxes around a central pillar obstacle. The
/// workspace box extends to z = 6.5 so the elevated goal stays interior.
const PSI3: &str = r#"
schema_version = 1
name = "psi3"
model = "double-integrator-3d"
formula = "F in(T1) & F in(T2) & F in(T3) & F in(T4) & F in(T5) & G (!in(O))"
start = [0.1, 0.1, 0.1]
goal = [5.5, 5.5, 6.25]
seed = 5

[workspace]
min = [0.0, 0.0, 0.0]
max = [6.0, 6.0, 6.5]

[[region]]
name = "T1"
role = "target"
center = [1.2, 1.2, 1.0]
halfwidths = [0.75, 0.75, 0.75]

[[region]]
name = "T2"
role = "target"
center = [4.6, 1.4, 2.2]
halfwidths = [0.75, 0.75, 0.75]

[[region]]
name = "T3"
role = "target"
center = [4.8, 4.8, 3.2]
halfwidths = [0.75, 0.75, 0.75]

[[region]]
name = "T4"
role = "target"
center = [1.6, 4.6, 4.2]
halfwidths = [0.75, 0.75, 0.75]

[[region]]
name = "T5"
role = "target"
center = [3.0, 3.0, 5.4]
halfwidths = [0.75, 0.75, 0.75]

[[region]]
name = "O"
role = "obstacle"
center = [3.0, 3.0, 2.2]
halfwidths = [0.5, 0.5, 2.2]

[weights]
control = 1.0
robustness = 20.0

[budget]
iterations = 3000
"#;

pub const BUILTIN_NAMES: [&str; 4] = ["psi1", "psi1-moved-T3", "psi2", "psi3"];

/// Names of the scenarios embedded in the library.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN_NAMES.to_vec()
}

/// Loads a built-in scenario by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "psi1" => Some(Scenario::from_toml_str(PSI1).expect("built-in psi1 is valid")),
        "psi1-moved-T3" => {
            let mut scenario = Scenario::from_toml_str(PSI1).expect("built-in psi1 is valid");
            scenario.name = "psi1-moved-T3".into();
            let t3 = scenario
                .regions
                .iter_mut()
                .find(|r| r.name == "T3")
                .expect("psi1 declares T3");
            t3.center = DVector::from_row_slice(&PSI1_MOVED_T3_CENTER);
            scenario.validate().expect("built-in psi1-moved-T3 is valid");
            Some(scenario)
        }
        "psi2" => Some(Scenario::from_toml_str(PSI2).expect("built-in psi2 is valid")),
        "psi3" => Some(Scenario::from_toml_str(PSI3).expect("built-in psi3 is valid")),
        _ => None,
    }
}

/// Resolves a scenario argument: a built-in name or a path to a TOML file.
pub fn resolve(spec: &str) -> Result<Scenario, ScenarioError> {
    if let Some(s) = builtin(spec) {
        return Ok(s);
    }
    Scenario::load(spec)
}
