//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export wraps a plain function that returns `Result<_, String>` so the
//! logic is testable natively.

use eisenzero::approx::{self, LineSeries};
use eisenzero::domains::{circle_deviation, classify_region, map_to_f0, map_to_fhalf};
use eisenzero::zerofinder::{compile_report, AxisGrid, DEFAULT_TOLERANCE};
use eisenzero::{ComplexPoint, TruncationPolicy, Weight};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn weight(k: i64) -> Result<Weight, String> {
    Weight::new(k).map_err(|e| e.to_string())
}

fn line(name: &str) -> Result<LineSeries, String> {
    match name {
        "e0_line" => Ok(LineSeries::E0Line),
        "ehalf_line" => Ok(LineSeries::EHalfLine),
        other => Err(format!("unknown line '{other}'")),
    }
}

/// Samples the scaled series and its approximant across the validity window.
/// Returns `[y, value, approximant]` triples, flattened.
pub fn line_profile_values(name: &str, k: i64, samples: usize) -> Result<Vec<f64>, String> {
    let (line, k) = (line(name)?, weight(k)?);
    if samples < 2 {
        return Err("at least two samples are needed".into());
    }
    let policy = TruncationPolicy::default();
    let (lo, hi) = (0.5, approx::window_upper(k));
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let y = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let v = approx::line_value(line, y, k, &policy).map_err(|e| e.to_string())?;
        out.extend([y, v.value, line.approximant(y, k)]);
    }
    Ok(out)
}

pub fn zero_report_text(k: i64) -> Result<String, String> {
    let report = compile_report(
        weight(k)?,
        &TruncationPolicy::default(),
        &AxisGrid::default(),
        DEFAULT_TOLERANCE,
    )
    .map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct Classification {
    region: Option<String>,
    f0: Option<[f64; 2]>,
    fhalf: Option<[f64; 2]>,
    circle_deviation: f64,
}

pub fn classify_text(x: f64, y: f64) -> Result<String, String> {
    let z = ComplexPoint::new(x, y).map_err(|e| e.to_string())?;
    let c = Classification {
        region: classify_region(z).map(|r| r.to_string()),
        f0: map_to_f0(z).ok().map(|w| [w.x, w.y]),
        fhalf: map_to_fhalf(z).ok().map(|w| [w.x, w.y]),
        circle_deviation: circle_deviation(z),
    };
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn line_profile(line: &str, k: i32, samples: u32) -> Result<Vec<f64>, JsError> {
    line_profile_values(line, k.into(), samples as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn zero_report_json(k: i32) -> Result<String, JsError> {
    zero_report_text(k.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classify_point(x: f64, y: f64) -> Result<String, JsError> {
    classify_text(x, y).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_follows_the_approximant() {
        let v = line_profile_values("ehalf_line", 101, 40).unwrap();
        assert_eq!(v.len(), 120);
        for t in v.chunks(3) {
            assert!((t[1] - t[2]).abs() < 2.0);
        }
        assert!(line_profile_values("e1_line", 101, 40).is_err());
        assert!(line_profile_values("e0_line", 8, 40).is_err());
    }

    #[test]
    fn report_lists_the_k15_zeroes() {
        let v: serde_json::Value = serde_json::from_str(&zero_report_text(15).unwrap()).unwrap();
        assert_eq!(v["count_found"], 2);
    }

    #[test]
    fn classification() {
        let v: serde_json::Value =
            serde_json::from_str(&classify_text(0.33, 0.2).unwrap()).unwrap();
        assert_eq!(v["region"], "B");
        let v: serde_json::Value =
            serde_json::from_str(&classify_text(0.1, 0.01).unwrap()).unwrap();
        assert!(v["region"].is_null());
        assert!(classify_text(0.0, -1.0).is_err());
    }
}
