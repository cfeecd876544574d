//! Deterministic SVG rendering of workspaces, trees, and trajectories.
//!
//! 2-D scenarios render as a single panel; 3-D scenarios as two panels
//! (top-down x/y and side x/z). Coordinates are formatted with fixed
//! precision so output bytes are identical across runs for a fixed seed.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::dynamics::SystemModel;
use crate::planner::PlanTree;
use crate::scenario::{RegionRole, Scenario};

const SCALE: f64 = 90.0; // px per meter
const MARGIN: f64 = 30.0;

/// Extracts the workspace-position polyline of every tree edge,
/// decimated to every third sample.
pub fn tree_polylines(model: &SystemModel, tree: &PlanTree) -> Vec<Vec<Vec<f64>>> {
    tree.nodes
        .iter()
        .filter_map(|node| node.edge.as_ref())
        .map(|edge| {
            let mut line: Vec<Vec<f64>> = edge
                .states
                .iter()
                .step_by(3)
                .map(|x| model.position(x))
                .collect();
            let last = model.position(edge.states.last().unwrap());
            if line.last() != Some(&last) {
                line.push(last);
            }
            line
        })
        .collect()
}

/// Straight segments (used for the geometric baseline tree).
pub fn segment_polylines(edges: &[(DVector<f64>, DVector<f64>)]) -> Vec<Vec<Vec<f64>>> {
    edges
        .iter()
        .map(|(a, b)| vec![a.iter().copied().collect(), b.iter().copied().collect()])
        .collect()
}

/// Position projection of a state sequence.
pub fn path_positions(model: &SystemModel, states: &[DVector<f64>]) -> Vec<Vec<f64>> {
    states.iter().map(|x| model.position(x)).collect()
}

struct Panel {
    axes: (usize, usize),
    label: &'static str,
}

/// Renders the scenario with optional tree edges and a final path, all in
/// workspace coordinates.
pub fn render(scenario: &Scenario, tree: &[Vec<Vec<f64>>], path: &[Vec<f64>]) -> String {
    let dim = scenario.workspace.dim();
    let panels: Vec<Panel> = if dim >= 3 {
        vec![Panel { axes: (0, 1), label: "top (x-y)" }, Panel { axes: (0, 2), label: "side (x-z)" }]
    } else {
        vec![Panel { axes: (0, 1), label: "" }]
    };

    let ws = &scenario.workspace;
    let panel_w = |ax: usize| (ws.max[ax] - ws.min[ax]) * SCALE;
    let panel_h = |ax: usize| (ws.max[ax] - ws.min[ax]) * SCALE;
    let mut total_w = MARGIN;
    let mut total_h: f64 = 0.0;
    for p in &panels {
        total_w += panel_w(p.axes.0) + MARGIN;
        total_h = total_h.max(panel_h(p.axes.1) + 2.0 * MARGIN);
    }

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n",
        total_w, total_h, total_w, total_h
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    let mut offset_x = MARGIN;
    for panel in &panels {
        let (ax, ay) = panel.axes;
        let w = panel_w(ax);
        let h = panel_h(ay);
        let to_px = |p: &[f64]| -> (f64, f64) {
            let x = offset_x + (p[ax] - ws.min[ax]) * SCALE;
            let y = MARGIN + h - (p[ay] - ws.min[ay]) * SCALE;
            (x, y)
        };

        let _ = writeln!(
            svg,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
            offset_x, MARGIN, w, h
        );
        if !panel.label.is_empty() {
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" font-family=\"sans-serif\">{}</text>",
                offset_x,
                MARGIN - 8.0,
                panel.label
            );
        }

        // Regions: obstacles shaded, targets outlined and labeled.
        for region in &scenario.regions {
            let corner = |sx: f64, sy: f64| {
                let mut p = vec![0.0; dim.max(2)];
                p[ax] = region.center[ax] + sx * region.halfwidths[ax];
                p[ay] = region.center[ay] + sy * region.halfwidths[ay];
                to_px(&p)
            };
            let (x0, y0) = corner(-1.0, 1.0);
            let (x1, y1) = corner(1.0, -1.0);
            match region.role {
                RegionRole::Obstacle => {
                    let _ = writeln!(
                        svg,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#9e9e9e\" stroke=\"#616161\"/>",
                        x0, y0, x1 - x0, y1 - y0
                    );
                }
                RegionRole::Target => {
                    let _ = writeln!(
                        svg,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#c8e6c9\" fill-opacity=\"0.6\" stroke=\"#2e7d32\"/>",
                        x0, y0, x1 - x0, y1 - y0
                    );
                }
            }
            let (cx, cy) = corner(0.0, 0.0);
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>",
                cx, cy, region.name
            );
        }

        // Tree edges, thin.
        for line in tree {
            if line.len() < 2 {
                continue;
            }
            let mut points = String::new();
            for p in line {
                let (x, y) = to_px(p);
                let _ = write!(points, "{x:.2},{y:.2} ");
            }
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#b0bec5\" stroke-width=\"0.7\"/>",
                points.trim_end()
            );
        }

        // Final path, thick.
        if path.len() >= 2 {
            let mut points = String::new();
            for p in path {
                let (x, y) = to_px(p);
                let _ = write!(points, "{x:.2},{y:.2} ");
            }
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1565c0\" stroke-width=\"2.5\"/>",
                points.trim_end()
            );
        }

        // Start and goal markers.
        let (sx, sy) = to_px(scenario.start.as_slice());
        let (gx, gy) = to_px(scenario.goal.as_slice());
        let _ = writeln!(svg, "<circle cx=\"{sx:.2}\" cy=\"{sy:.2}\" r=\"5\" fill=\"#2e7d32\"/>");
        let _ = writeln!(
            svg,
            "<circle cx=\"{gx:.2}\" cy=\"{gy:.2}\" r=\"5\" fill=\"#c62828\"/>"
        );

        offset_x += w + MARGIN;
    }
    svg.push_str("</svg>\n");
    svg
}
