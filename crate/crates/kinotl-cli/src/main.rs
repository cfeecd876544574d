//! Command-line front end: plan scenarios, run the geometric baseline,
//! produce comparison tables, and export trajectories, reports, and SVG
//! plots.
//!
//! Exit codes: 0 success, 2 planner found no path, 3 invalid scenario.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use kinotl::baseline::plan_baseline;
use kinotl::planner::plan;
use kinotl::report::{compare, trajectory_csv, Mode, RunReport, REPORT_SCHEMA_VERSION};
use kinotl::scenario::{builtin_names, resolve, Scenario};
use kinotl::svg;

const EXIT_NO_PATH: u8 = 2;
const EXIT_INVALID_SCENARIO: u8 = 3;

#[derive(Parser)]
#[command(name = "kinotl", about = "Kinodynamic motion planning under temporal logic specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Built-in scenario name or path to a scenario TOML file.
    #[arg(long)]
    scenario: String,
    /// Override the scenario's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the iteration budget.
    #[arg(long)]
    iters: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Directory that receives the timestamped run directory.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a scenario with the kinodynamic planner.
    Plan {
        #[command(flatten)]
        args: RunArgs,
        /// Planner mode.
        #[arg(long, default_value = "kinodynamic")]
        mode: String,
    },
    /// Run the geometric (no kinodynamic constraints) baseline.
    Baseline {
        #[command(flatten)]
        args: RunArgs,
    },
    /// Run both modes over scenarios and seeds, emitting a comparison table.
    Compare {
        /// Comma-separated scenario names or paths.
        #[arg(long, value_delimiter = ',', default_value = "psi1,psi2,psi3")]
        scenarios: Vec<String>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u64>,
        /// Iteration budget per run (defaults to each scenario's own).
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// List the built-in scenarios.
    Scenarios,
    /// Validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Plan { args, mode } => match mode.as_str() {
            "kinodynamic" => run_plan(args),
            "geometric-baseline" => run_baseline(args),
            other => anyhow::bail!("unknown mode `{other}`"),
        },
        Command::Baseline { args } => run_baseline(args),
        Command::Compare { scenarios, seeds, iters, out_dir } => {
            run_compare(&scenarios, &seeds, iters, &out_dir)
        }
        Command::Scenarios => {
            for name in builtin_names() {
                let s = kinotl::scenario::builtin(name).expect("built-in");
                println!(
                    "{name:<16} model={:<22} iters={:<6} formula: {}",
                    s.model_name, s.budget.iterations, s.formula_text
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario } => match resolve(&scenario) {
            Ok(s) => {
                println!("ok: scenario `{}` is valid", s.name);
                Ok(ExitCode::SUCCESS)
            }
            Err(err) => {
                eprintln!("invalid scenario: {err}");
                Ok(ExitCode::from(EXIT_INVALID_SCENARIO))
            }
        },
    }
}

fn load_scenario(args: &RunArgs) -> anyhow::Result<Result<Scenario, ExitCode>> {
    let mut scenario = match resolve(&args.scenario) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("invalid scenario: {err}");
            return Ok(Err(ExitCode::from(EXIT_INVALID_SCENARIO)));
        }
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(iters) = args.iters {
        scenario.budget.iterations = iters;
    }
    if let Some(budget) = args.time_budget {
        scenario.budget.time_seconds = Some(budget);
    }
    Ok(Ok(scenario))
}

fn run_dir(base: &Path, scenario: &str, mode: Mode, seed: u64) -> anyhow::Result<PathBuf> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).unwrap().as_secs();
    let dir = base.join(format!("{scenario}_{mode}_seed{seed}_{stamp}"));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn run_plan(args: RunArgs) -> anyhow::Result<ExitCode> {
    let scenario = match load_scenario(&args)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let model = scenario.model()?;
    let result = plan(&scenario)?;
    let dir = run_dir(&args.out_dir, &scenario.name, Mode::Kinodynamic, scenario.seed)?;

    let tree_lines = svg::tree_polylines(&model, &result.tree);
    let (report, path_positions) = match &result.solution {
        Some(sol) => (
            RunReport {
                schema_version: REPORT_SCHEMA_VERSION,
                scenario: scenario.name.clone(),
                mode: Mode::Kinodynamic,
                satisfied: sol.satisfied,
                total_cost: sol.total_cost,
                root_robustness: sol.root_robustness,
                max_control_effort: sol.max_control_effort,
                wall_time: result.stats.wall_time,
                seed: scenario.seed,
            },
            svg::path_positions(&model, &sol.states),
        ),
        None => (
            RunReport {
                schema_version: REPORT_SCHEMA_VERSION,
                scenario: scenario.name.clone(),
                mode: Mode::Kinodynamic,
                satisfied: false,
                total_cost: f64::INFINITY,
                root_robustness: f64::NEG_INFINITY,
                max_control_effort: 0.0,
                wall_time: result.stats.wall_time,
                seed: scenario.seed,
            },
            Vec::new(),
        ),
    };

    std::fs::write(dir.join("plot.svg"), svg::render(&scenario, &tree_lines, &path_positions))?;
    report.write(dir.join("report.toml"))?;
    if let Some(sol) = &result.solution {
        std::fs::write(
            dir.join("trajectory.csv"),
            trajectory_csv(&sol.times, &sol.states, &sol.controls),
        )?;
        println!(
            "{}: satisfied={} robustness={:.4} cost={:.3} max|u|={:.4} nodes={} time={:.1}s -> {}",
            scenario.name,
            sol.satisfied,
            sol.root_robustness,
            sol.total_cost,
            sol.max_control_effort,
            result.stats.nodes,
            result.stats.wall_time,
            dir.display()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "{}: no path (nodes={} rejected_edges={} time={:.1}s) -> {}",
            scenario.name,
            result.stats.nodes,
            result.stats.rejected_edges,
            result.stats.wall_time,
            dir.display()
        );
        Ok(ExitCode::from(EXIT_NO_PATH))
    }
}

fn run_baseline(args: RunArgs) -> anyhow::Result<ExitCode> {
    let scenario = match load_scenario(&args)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let result = plan_baseline(&scenario)?;
    let dir = run_dir(&args.out_dir, &scenario.name, Mode::GeometricBaseline, scenario.seed)?;

    let tree_lines = svg::segment_polylines(&result.tree_edges);
    let path: Vec<Vec<f64>> =
        result.positions.iter().map(|p| p.iter().copied().collect()).collect();
    std::fs::write(dir.join("plot.svg"), svg::render(&scenario, &tree_lines, &path))?;

    let found = !result.positions.is_empty();
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        mode: Mode::GeometricBaseline,
        satisfied: result.satisfied,
        total_cost: result.total_cost,
        root_robustness: result.root_robustness,
        max_control_effort: result.max_control_effort,
        wall_time: result.stats.wall_time,
        seed: scenario.seed,
    };
    report.write(dir.join("report.toml"))?;
    if found {
        std::fs::write(
            dir.join("trajectory.csv"),
            trajectory_csv(&result.times, &result.positions, &result.controls),
        )?;
        println!(
            "{} (baseline): satisfied={} robustness={:.4} implied max|u|={:.4} time={:.1}s -> {}",
            scenario.name,
            result.satisfied,
            result.root_robustness,
            result.max_control_effort,
            result.stats.wall_time,
            dir.display()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{} (baseline): no path -> {}", scenario.name, dir.display());
        Ok(ExitCode::from(EXIT_NO_PATH))
    }
}

fn run_compare(
    scenario_specs: &[String],
    seeds: &[u64],
    iters: Option<usize>,
    out_dir: &Path,
) -> anyhow::Result<ExitCode> {
    let mut scenarios = Vec::new();
    for spec in scenario_specs {
        match resolve(spec) {
            Ok(s) => scenarios.push(s),
            Err(err) => {
                eprintln!("invalid scenario `{spec}`: {err}");
                return Ok(ExitCode::from(EXIT_INVALID_SCENARIO));
            }
        }
    }
    let table = compare(&scenarios, seeds, iters);
    print!("{}", table.render_text());
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("compare.csv"), table.to_csv())?;
    std::fs::write(out_dir.join("compare.txt"), table.render_text())?;
    if table.kinodynamic_bound_violated() {
        eprintln!("error: kinodynamic run exceeded an input bound; planner invariant broken");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
