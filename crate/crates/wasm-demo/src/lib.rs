use dynspec::cantor::{build_cover, preset};
use dynspec::dimension::dimension_bounds;
use dynspec::numeric::rational::{parse, to_f64};
use dynspec::spectra::{spectrum_scan, ShiftObservable};
use dynspec::sumsets::{auto_interval_op, certify_op, image_cover, SumOp};
use dynspec::symbolic::TransitionMatrix;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_DEPTH: usize = 10;
const MAX_PERIOD: usize = 10;

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Bounds for every depth up to `depth`, plus the depth-`depth` cover.
pub fn dimension_json(name: &str, depth: usize) -> Result<Value, String> {
    let k = preset(name).map_err(err)?;
    let depth = depth.clamp(1, MAX_DEPTH);
    let rows = (1..=depth).map(|n| dimension_bounds(&k, n)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let cover: Vec<(f64, f64)> = build_cover(&k, depth.min(7)).outer_intervals().iter().map(|i| i.to_f64_pair()).collect();
    Ok(json!({
        "set": k.name,
        "rows": rows.iter().map(|b| json!({"depth": b.depth, "lower": b.alpha, "upper": b.beta})).collect::<Vec<_>>(),
        "cover": cover,
    }))
}

/// Markov values of periodic orbits of the full shift whose letters carry `digits`.
pub fn spectrum_json(digits: &str, max_period: usize) -> Result<Value, String> {
    let d = digits
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("bad digit {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let f = ShiftObservable::continued_fraction(d.clone()).map_err(err)?;
    let b = TransitionMatrix::full(d.len());
    let s = spectrum_scan(&f, &b, max_period.clamp(1, MAX_PERIOD), 5).map_err(err)?;
    Ok(json!({
        "orbits": s.orbits,
        "values": s.values.iter().map(|v| json!({"exact": v.value.to_string(), "decimal": v.value.to_f64()})).collect::<Vec<_>>(),
        "gaps": s.gaps,
    }))
}

/// Cover of `left op right` at `depth` with an interval certificate over the trimmed hull.
pub fn sumset_json(left: &str, right: &str, minus: bool, depth: usize, margin: &str) -> Result<Value, String> {
    let (k, k2) = (preset(left).map_err(err)?, preset(right).map_err(err)?);
    let op = if minus { SumOp::Minus } else { SumOp::Plus };
    let depth = depth.clamp(1, 7);
    let cover = image_cover(&op.poly(), &k, &k2, depth);
    let m = parse(margin).map_err(err)?;
    let cert = match auto_interval_op(&k, &k2, op, &m) {
        Some((lo, hi)) => serde_json::to_value(certify_op(&k, &k2, op, &lo, &hi, depth)).map_err(err)?,
        None => json!({"outcome": "refused", "reason": "no exact hull"}),
    };
    Ok(json!({
        "cover": cover.union.to_f64_pairs(),
        "components": cover.union.len(),
        "length": to_f64(&cover.union.length()),
        "certificate": cert,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dimension(name: &str, depth: usize) -> Result<String, JsError> {
    to_js(dimension_json(name, depth))
}

#[wasm_bindgen]
pub fn spectrum(digits: &str, max_period: usize) -> Result<String, JsError> {
    to_js(spectrum_json(digits, max_period))
}

#[wasm_bindgen]
pub fn sumset(left: &str, right: &str, minus: bool, depth: usize, margin: &str) -> Result<String, JsError> {
    to_js(sumset_json(left, right, minus, depth, margin))
}
