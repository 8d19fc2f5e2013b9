//! Browser bindings: analyze a hypergraph, simulate the urn, integrate the
//! flow. Each call takes a hypergraph as `builtin:<name>` or JSON text and
//! returns JSON or SVG text for the page to drop in.
//!
//! The `*_text` functions hold the logic and are plain Rust so they can be
//! tested on the host.

use polyurn::analysis::{analyze, AnalysisOptions};
use polyurn::dynamics::{flow_integrate, FlowDomain, SimplexPoint};
use polyurn::simulate::{run, Schedule, SimConfig};
use polyurn::svg::LineChart;
use polyurn::Hypergraph;
use wasm_bindgen::prelude::*;

/// Longest simulation the page may request; keeps the tab responsive.
pub const MAX_WORK: u64 = 5_000_000;

fn load(source: &str) -> Result<Hypergraph, String> {
    Hypergraph::from_source(source).map_err(|e| e.to_string())
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| format!("cannot parse {s:?}")))
        .collect()
}

pub fn analyze_text(source: &str) -> Result<String, String> {
    let h = load(source)?;
    let report = analyze(&h, &AnalysisOptions::default()).map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())
}

/// Trajectories of every replica as one chart per replica, stacked.
pub fn simulate_text(source: &str, balls: &str, steps: u32, replicas: u32, seed: u32) -> Result<String, String> {
    let h = load(source)?;
    let mut cfg = SimConfig::new(h.m(), seed as u64, replicas as usize, steps as u64);
    if !balls.trim().is_empty() {
        cfg.initial_balls = parse_list(balls)?;
    }
    cfg.schedule = Schedule::Geometric { ratio: 1.05 };
    if cfg.steps * cfg.replicas as u64 * h.n_edges() as u64 > MAX_WORK {
        return Err(format!("steps × replicas × edges must stay below {MAX_WORK}"));
    }
    let results = run(&h, &cfg).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for r in &results {
        let mut chart = LineChart::new(format!("replica {}", r.replica), "n", "x_i(n)");
        chart.log_x = true;
        for i in 0..h.m() {
            chart.push(format!("x{i}"), r.samples.iter().map(|s| (s.n as f64, s.x[i])).collect());
        }
        out.push_str(&chart.render());
    }
    Ok(out)
}

/// `v(t)` and `L(v(t))` charts; empty `start` means uniform.
pub fn flow_text(source: &str, start: &str, t_end: f64, dt: f64) -> Result<String, String> {
    let h = load(source)?;
    let v0 = if start.trim().is_empty() {
        SimplexPoint::uniform(h.m())
    } else {
        SimplexPoint::new(parse_list(start)?).map_err(|e| e.to_string())?
    };
    if v0.len() != h.m() {
        return Err(format!("start has {} coordinates, hypergraph has {}", v0.len(), h.m()));
    }
    if t_end / dt > 1e5 {
        return Err("t_end / dt must stay below 100000".into());
    }
    let traj = flow_integrate(&h, &v0, FlowDomain::default_for(&h), t_end, dt).map_err(|e| e.to_string())?;
    let stride = (traj.samples.len() / 2000).max(1);
    let thin: Vec<_> = traj.samples.iter().step_by(stride).collect();
    let mut v = LineChart::new("v(t)", "t", "v_i");
    for i in 0..h.m() {
        v.push(format!("v{i}"), thin.iter().map(|s| (s.t, s.v[i])).collect());
    }
    let mut l = LineChart::new("L(v(t))", "t", "L");
    l.push("L", thin.iter().map(|s| (s.t, s.lyapunov)).collect());
    Ok(v.render() + &l.render())
}

#[wasm_bindgen]
pub fn analyze_json(source: &str) -> Result<String, JsValue> {
    analyze_text(source).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate_svg(source: &str, balls: &str, steps: u32, replicas: u32, seed: u32) -> Result<String, JsValue> {
    simulate_text(source, balls, steps, replicas, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn flow_svg(source: &str, start: &str, t_end: f64, dt: f64) -> Result<String, JsValue> {
    flow_text(source, start, t_end, dt).map_err(|e| JsValue::from_str(&e))
}
