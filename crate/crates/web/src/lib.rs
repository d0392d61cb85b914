//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a JSON string; the `*_json` functions underneath are
//! plain Rust so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qldpc_bounds::bounds::{eval_s_d, RecurrenceParams};
use qldpc_bounds::code::parse_code;
use qldpc_bounds::generators::{geometric_cut_separator, make_hyperbolic_patch, Coordinates};
use qldpc_bounds::report::{analyze, AnalysisConfig};

/// Largest patch the page will draw.
const MAX_RINGS: usize = 6;

#[derive(Serialize)]
struct Patch {
    /// Cartesian points in the unit disk.
    points: Vec<(f64, f64)>,
    edges: Vec<(usize, usize)>,
    /// 0 = side A, 1 = separator, 2 = side B.
    part: Vec<u8>,
    separator_size: usize,
}

pub fn hyperbolic_patch_json(p: usize, q: usize, rings: usize, alpha: f64) -> Result<String, String> {
    if rings > MAX_RINGS {
        return Err(format!("at most {MAX_RINGS} rings"));
    }
    let eg = make_hyperbolic_patch(p, q, rings).map_err(|e| e.to_string())?;
    let sep = geometric_cut_separator(&eg, alpha).map_err(|e| e.to_string())?;
    let Coordinates::Poincare { points } = &eg.coordinates else {
        return Err("expected disk coordinates".into());
    };
    let mut part = vec![0u8; eg.graph.n()];
    for v in sep.s.iter() {
        part[v] = 1;
    }
    for v in sep.b.iter() {
        part[v] = 2;
    }
    let patch = Patch {
        points: points.iter().map(|&(r, t)| (r * t.cos(), r * t.sin())).collect(),
        edges: eg.graph.edges().to_vec(),
        part,
        separator_size: sep.size(),
    };
    serde_json::to_string(&patch).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    n: usize,
    s_d: u64,
    /// `S_d(n) / (d^(c-1) n)`.
    ratio: f64,
}

pub fn recurrence_curve_json(c: f64, d: usize, doublings: u32) -> Result<String, String> {
    let params = RecurrenceParams::power_law(1.0, c);
    params.validate().map_err(|e| e.to_string())?;
    if d == 0 || doublings > 30 {
        return Err("need d >= 1 and at most 30 doublings".into());
    }
    let scale = (d as f64).powf(c - 1.0);
    let curve: Vec<CurvePoint> = (0..=doublings)
        .map(|i| {
            let n = d << i;
            let s_d = eval_s_d(&params, d, n);
            CurvePoint { n, s_d, ratio: s_d as f64 / (scale * n as f64) }
        })
        .collect();
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

pub fn analyze_code_json(text: &str) -> Result<String, String> {
    let code = parse_code(text).map_err(|e| e.to_string())?;
    let report = analyze(&code, &AnalysisConfig::default()).map_err(|e| e.to_string())?;
    Ok(report.to_json())
}

#[wasm_bindgen]
pub fn hyperbolic_patch(p: usize, q: usize, rings: usize, alpha: f64) -> Result<String, JsValue> {
    hyperbolic_patch_json(p, q, rings, alpha).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn recurrence_curve(c: f64, d: usize, doublings: u32) -> Result<String, JsValue> {
    recurrence_curve_json(c, d, doublings).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze_code(text: &str) -> Result<String, JsValue> {
    analyze_code_json(text).map_err(|e| JsValue::from_str(&e))
}
