//! Browser bindings for the Moufang loop toolkit. Every export takes and
//! returns JSON strings; the page in `www/` draws the results.

use moufang_core::algebra::basis_table;
use moufang_core::chart::{LoopChart, LoopPoint};
use moufang_core::malcev::{structure_constants, structure_functions};
use moufang_core::suite::{run_suite, RunConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest ray parameter accepted by [`deformation_json`].
pub const MAX_RAY: f64 = 0.9;

/// Runs the checks described by a (possibly partial) configuration object.
pub fn run_checks_json(config: &str) -> Result<String, String> {
    let cfg = if config.trim().is_empty() {
        RunConfig::default()
    } else {
        RunConfig::from_json(config).map_err(|e| e.to_string())?
    };
    run_suite(&cfg).map(|r| r.to_json()).map_err(|e| e.to_string())
}

/// Signed basis multiplication table, `{level, entries: [{i, j, sign, m}]}`.
pub fn multiplication_table_json(level: u32) -> Result<String, String> {
    basis_table(level).map(|t| t.to_json()).map_err(|e| e.to_string())
}

/// `max |c(t u) - c|` along the ray through the unit vector `u` for
/// `steps + 1` evenly spaced `t` in `[0, t_max]`.
pub fn deformation_json(level: u32, direction: &[f64], t_max: f64, steps: usize) -> Result<String, String> {
    let chart = LoopChart::new(level).map_err(|e| e.to_string())?;
    if direction.len() != chart.dim() {
        return Err(format!("direction needs {} coordinates", chart.dim()));
    }
    let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err("direction must be a nonzero vector".into());
    }
    if !(t_max > 0.0 && t_max <= MAX_RAY) {
        return Err(format!("t_max must lie in (0, {MAX_RAY}]"));
    }
    let steps = steps.clamp(1, 400);
    let c = structure_constants(&chart).map_err(|e| e.to_string())?;
    let mut t_values = Vec::with_capacity(steps + 1);
    let mut gaps = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = t_max * k as f64 / steps as f64;
        let g = LoopPoint(direction.iter().map(|d| t * d / n).collect());
        let cg = structure_functions(&chart, &g).map_err(|e| e.to_string())?;
        t_values.push(t);
        gaps.push(cg.tensor.max_abs_diff(&c.tensor));
    }
    Ok(json!({ "level": level, "t": t_values, "gap": gaps }).to_string())
}

#[wasm_bindgen]
pub fn run_checks(config: &str) -> Result<String, JsValue> {
    run_checks_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn multiplication_table(level: u32) -> Result<String, JsValue> {
    multiplication_table_json(level).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn deformation(level: u32, direction: &[f64], t_max: f64, steps: usize) -> Result<String, JsValue> {
    deformation_json(level, direction, t_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn checks_round_trip() {
        let text = run_checks_json(r#"{"loop": "quaternion", "checks": ["corollary"], "samples": 3}"#).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "pass"));
        assert!(run_checks_json(r#"{"radius": 5}"#).is_err());
    }

    #[test]
    fn sedenion_table_available() {
        let v: Value = serde_json::from_str(&multiplication_table_json(4).unwrap()).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 256);
        assert!(multiplication_table_json(9).is_err());
    }

    #[test]
    fn deformation_profile() {
        let v: Value = serde_json::from_str(&deformation_json(3, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0], 0.5, 5).unwrap()).unwrap();
        let gap: Vec<f64> = v["gap"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(gap.len(), 6);
        assert!(gap[0] <= 1e-9);
        assert!(gap.windows(2).all(|w| w[1] > w[0]));
        let q: Value = serde_json::from_str(&deformation_json(2, &[0.0, 1.0, 0.0], 0.8, 4).unwrap()).unwrap();
        assert!(q["gap"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap() <= 1e-9));
        assert!(deformation_json(3, &[1.0], 0.5, 5).is_err());
        assert!(deformation_json(2, &[0.0; 3], 0.5, 5).is_err());
        assert!(deformation_json(2, &[1.0, 0.0, 0.0], 1.5, 5).is_err());
    }
}
