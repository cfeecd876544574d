//! Browser demo bindings: plan a built-in scenario, steer a single optimal
//! edge between two clicked points, and probe formula robustness at a
//! point, all rendered as SVG strings for a static page.
//!
//! Build with `wasm-pack build --target web crates/kinotl-wasm` (or
//! `cargo build --target wasm32-unknown-unknown` plus `wasm-bindgen`) and
//! serve `www/`.

use nalgebra::DVector;
use wasm_bindgen::prelude::*;

use kinotl::logic::{parse_formula, CompiledFormula};
use kinotl::planner::plan;
use kinotl::scenario::{builtin, builtin_names};
use kinotl::steering::{SteeringContext, TauRange, DEFAULT_SAMPLE_DT};
use kinotl::svg;

fn err_js(message: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&message.to_string())
}

/// JSON array of built-in scenario names.
#[wasm_bindgen]
pub fn scenario_names() -> String {
    serde_json::to_string(&builtin_names()).unwrap()
}

/// Scenario metadata and an empty-workspace rendering.
#[wasm_bindgen]
pub fn scenario_info(name: &str) -> Result<String, JsValue> {
    let s = builtin(name).ok_or_else(|| err_js(format!("unknown scenario {name}")))?;
    let out = serde_json::json!({
        "name": s.name,
        "model": s.model_name,
        "formula": s.formula_text,
        "iterations": s.budget.iterations,
        "seed": s.seed,
        "svg": svg::render(&s, &[], &[]),
    });
    Ok(out.to_string())
}

/// Runs the planner on a built-in scenario and returns the rendered tree,
/// path, and run statistics as JSON.
#[wasm_bindgen]
pub fn plan_scenario(name: &str, seed: u32, iterations: u32) -> Result<String, JsValue> {
    let mut scenario = builtin(name).ok_or_else(|| err_js(format!("unknown scenario {name}")))?;
    scenario.seed = seed as u64;
    scenario.budget.iterations = iterations as usize;
    scenario.budget.time_seconds = None;
    let model = scenario.model().map_err(err_js)?;
    let result = plan(&scenario).map_err(err_js)?;
    let tree_lines = svg::tree_polylines(&model, &result.tree);
    let (path, summary) = match &result.solution {
        Some(sol) => (
            svg::path_positions(&model, &sol.states),
            serde_json::json!({
                "satisfied": sol.satisfied,
                "robustness": sol.root_robustness,
                "cost": sol.total_cost,
                "max_control_effort": sol.max_control_effort,
            }),
        ),
        None => (Vec::new(), serde_json::json!(null)),
    };
    let out = serde_json::json!({
        "svg": svg::render(&scenario, &tree_lines, &path),
        "nodes": result.stats.nodes,
        "iterations": result.stats.iterations,
        "rejected_edges": result.stats.rejected_edges,
        "solution": summary,
    });
    Ok(out.to_string())
}

/// Steers one closed-form optimal edge between two workspace points of a
/// 2-D scenario and reports its arrival time, cost, and feasibility.
#[wasm_bindgen]
pub fn steer_edge(name: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> Result<String, JsValue> {
    let scenario = builtin(name).ok_or_else(|| err_js(format!("unknown scenario {name}")))?;
    let model = scenario.model().map_err(err_js)?;
    if model.position_dim != 2 {
        return Err(err_js("interactive steering works on 2-D scenarios"));
    }
    let from = DVector::from_row_slice(&[x0, y0]);
    let to = DVector::from_row_slice(&[x1, y1]);
    let lin = model
        .linearize(&from, &DVector::zeros(model.input_dim))
        .map_err(err_js)?;
    let range = TauRange::for_system(&lin);
    let ctx = SteeringContext::new(lin, range, DEFAULT_SAMPLE_DT);
    let edge = ctx.steer(&from, &to, scenario.weights.control).map_err(err_js)?;
    let path: Vec<Vec<f64>> = edge.states.iter().map(|x| model.position(x)).collect();
    let peak = edge
        .controls
        .iter()
        .flat_map(|u| u.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let out = serde_json::json!({
        "svg": svg::render(&scenario, &[], &path),
        "arrival_time": edge.arrival_time,
        "control_cost": edge.control_cost,
        "peak_input": peak,
        "feasible": edge.feasible(),
    });
    Ok(out.to_string())
}

/// Robustness of the scenario formula for the length-one trajectory at a
/// workspace point (a quick "what does the specification think of standing
/// here" probe).
#[wasm_bindgen]
pub fn robustness_at(name: &str, x: f64, y: f64) -> Result<String, JsValue> {
    let scenario = builtin(name).ok_or_else(|| err_js(format!("unknown scenario {name}")))?;
    if scenario.workspace.dim() != 2 {
        return Err(err_js("the probe works on 2-D scenarios"));
    }
    let formula = scenario.formula().map_err(err_js)?;
    let monitor = CompiledFormula::compile(&formula, scenario.rho_max());
    let state = monitor.init(&[x, y]).map_err(err_js)?;
    let per_region: Vec<serde_json::Value> = scenario
        .regions
        .iter()
        .map(|r| {
            let f = parse_formula(&format!("in({})", r.name), &scenario.region_table()).unwrap();
            let c = CompiledFormula::compile(&f, scenario.rho_max());
            let v = c.init(&[x, y]).unwrap().root();
            serde_json::json!({ "region": r.name, "robustness": v })
        })
        .collect();
    let out = serde_json::json!({
        "robustness": state.root(),
        "capped": state.capped_root(),
        "regions": per_region,
    });
    Ok(out.to_string())
}
