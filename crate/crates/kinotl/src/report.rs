//! Run reports, trajectory CSV export/import, and comparison tables.
//!
//! CSV columns are `t, x1..xn, u1..um` with a header row, SI units. Floats
//! are written with the shortest exact representation, so a re-imported
//! trajectory is bit-identical and exports are deterministic for a fixed
//! seed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::plan_baseline;
use crate::planner::{plan, PlanError};
use crate::scenario::Scenario;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Kinodynamic,
    GeometricBaseline,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Kinodynamic => write!(f, "kinodynamic"),
            Mode::GeometricBaseline => write!(f, "geometric-baseline"),
        }
    }
}

/// Summary of one planning run, serialized as TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: String,
    pub mode: Mode,
    pub satisfied: bool,
    pub total_cost: f64,
    pub root_robustness: f64,
    /// Largest per-component input magnitude, units per model.
    pub max_control_effort: f64,
    pub wall_time: f64,
    pub seed: u64,
}

impl RunReport {
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ReportError> {
        fs::write(path, self.to_toml_string())?;
        Ok(())
    }
}

/// Renders a trajectory as CSV text.
pub fn trajectory_csv(
    times: &[f64],
    states: &[DVector<f64>],
    controls: &[DVector<f64>],
) -> String {
    assert_eq!(times.len(), states.len());
    assert_eq!(states.len(), controls.len());
    let n = states.first().map(|x| x.len()).unwrap_or(0);
    let m = controls.first().map(|u| u.len()).unwrap_or(0);
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    for i in 1..=m {
        let _ = write!(out, ",u{i}");
    }
    out.push('\n');
    for k in 0..times.len() {
        let _ = write!(out, "{}", times[k]);
        for v in states[k].iter() {
            let _ = write!(out, ",{v}");
        }
        for v in controls[k].iter() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(
    path: impl AsRef<Path>,
    times: &[f64],
    states: &[DVector<f64>],
    controls: &[DVector<f64>],
) -> Result<(), ReportError> {
    fs::write(path, trajectory_csv(times, states, controls))?;
    Ok(())
}

/// Parses CSV text produced by [`trajectory_csv`]. State and input widths
/// are recovered from the header.
#[allow(clippy::type_complexity)]
pub fn parse_trajectory_csv(
    text: &str,
) -> Result<(Vec<f64>, Vec<DVector<f64>>, Vec<DVector<f64>>), ReportError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ReportError::Csv {
        line: 1,
        message: "missing header".into(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    let n = columns.iter().filter(|c| c.starts_with('x')).count();
    let m = columns.iter().filter(|c| c.starts_with('u')).count();
    if columns.first() != Some(&"t") || columns.len() != 1 + n + m {
        return Err(ReportError::Csv { line: 1, message: "unrecognized header".into() });
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut controls = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 1 + n + m {
            return Err(ReportError::Csv {
                line: idx + 1,
                message: format!("expected {} fields, found {}", 1 + n + m, fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64, ReportError> {
            s.parse().map_err(|_| ReportError::Csv {
                line: idx + 1,
                message: format!("bad float `{s}`"),
            })
        };
        times.push(parse(fields[0])?);
        let mut x = DVector::zeros(n);
        for i in 0..n {
            x[i] = parse(fields[1 + i])?;
        }
        let mut u = DVector::zeros(m);
        for i in 0..m {
            u[i] = parse(fields[1 + n + i])?;
        }
        states.push(x);
        controls.push(u);
    }
    Ok((times, states, controls))
}

pub fn read_trajectory_csv(
    path: impl AsRef<Path>,
) -> Result<(Vec<f64>, Vec<DVector<f64>>, Vec<DVector<f64>>), ReportError> {
    parse_trajectory_csv(&fs::read_to_string(path)?)
}

/// One (scenario, mode) aggregate in a comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct CompareCell {
    pub scenario: String,
    pub mode: Mode,
    pub median_effort: f64,
    /// Worst effort across the seeds (the "never exceeds" check).
    pub max_effort: f64,
    pub median_wall_time: f64,
    pub input_bound: f64,
    pub exceeds_bound: bool,
    pub runs: usize,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct CompareTable {
    pub cells: Vec<CompareCell>,
    pub seeds: Vec<u64>,
}

impl CompareTable {
    pub fn cell(&self, scenario: &str, mode: Mode) -> Option<&CompareCell> {
        self.cells.iter().find(|c| c.scenario == scenario && c.mode == mode)
    }

    /// Any kinodynamic run exceeding its input bound indicates a planner
    /// defect; callers treat this as a hard failure.
    pub fn kinodynamic_bound_violated(&self) -> bool {
        self.cells
            .iter()
            .any(|c| c.mode == Mode::Kinodynamic && c.max_effort > c.input_bound)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:<20} {:>14} {:>12} {:>8} {:>8}",
            "scenario", "mode", "median effort", "median time", "bound", "flag"
        );
        for cell in &self.cells {
            let _ = writeln!(
                out,
                "{:<16} {:<20} {:>14.4} {:>11.2}s {:>8.2} {:>8}",
                cell.scenario,
                cell.mode.to_string(),
                cell.median_effort,
                cell.median_wall_time,
                cell.input_bound,
                if cell.exceeds_bound { "OVER" } else { "ok" }
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scenario,mode,median_effort,max_effort,median_wall_time,input_bound,exceeds_bound,runs,failures\n",
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.scenario,
                c.mode,
                c.median_effort,
                c.max_effort,
                c.median_wall_time,
                c.input_bound,
                c.exceeds_bound,
                c.runs,
                c.failures
            );
        }
        out
    }
}

fn median(values: &mut Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Runs both modes for every scenario and seed and aggregates medians.
/// Failed runs are counted per cell; the table is emitted regardless.
pub fn compare(
    scenarios: &[Scenario],
    seeds: &[u64],
    iterations_override: Option<usize>,
) -> CompareTable {
    let mut cells = Vec::new();
    for scenario in scenarios {
        let bound = scenario
            .model()
            .map(|m| m.input_bounds.max.amax())
            .unwrap_or(f64::NAN);
        for mode in [Mode::Kinodynamic, Mode::GeometricBaseline] {
            let mut efforts = Vec::new();
            let mut wall_times = Vec::new();
            let mut failures = 0usize;
            for &seed in seeds {
                let mut run = scenario.clone();
                run.seed = seed;
                if let Some(iters) = iterations_override {
                    run.budget.iterations = iters;
                }
                let outcome: Result<(f64, f64), ()> = match mode {
                    Mode::Kinodynamic => match plan(&run) {
                        Ok(result) => match result.solution {
                            Some(sol) => Ok((sol.max_control_effort, result.stats.wall_time)),
                            None => Err(()),
                        },
                        Err(_) => Err(()),
                    },
                    Mode::GeometricBaseline => match plan_baseline(&run) {
                        Ok(result) if !result.positions.is_empty() => {
                            Ok((result.max_control_effort, result.stats.wall_time))
                        }
                        _ => Err(()),
                    },
                };
                match outcome {
                    Ok((effort, wall)) => {
                        efforts.push(effort);
                        wall_times.push(wall);
                    }
                    Err(()) => failures += 1,
                }
            }
            let max_effort = efforts.iter().copied().fold(0.0, f64::max);
            let median_effort = median(&mut efforts);
            cells.push(CompareCell {
                scenario: scenario.name.clone(),
                mode,
                median_effort,
                max_effort,
                median_wall_time: median(&mut wall_times),
                input_bound: bound,
                exceeds_bound: median_effort > bound,
                runs: seeds.len(),
                failures,
            });
        }
    }
    CompareTable { cells, seeds: seeds.to_vec() }
}
