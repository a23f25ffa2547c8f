//! wasm-bindgen entry points for `www/index.html`. Every function takes
//! text literals and returns a JSON string.

use serde_json::json;
use wasm_bindgen::prelude::*;

use sumset_core::bounds::multiplicity_bounds;
use sumset_core::error::Error;
use sumset_core::group::{FiniteAbelianGroup, GroupSubset};
use sumset_core::harness::classify_pair;
use sumset_core::parse::{format_element, format_set, parse_group, parse_set};
use sumset_core::sumset::{nu_profile, sumset};

fn pair(group: &str, a: &str, b: &str) -> Result<(FiniteAbelianGroup, GroupSubset, GroupSubset), Error> {
    let g = parse_group(group)?;
    let a = parse_set(&g, a)?;
    let b = parse_set(&g, b)?;
    Ok((g, a, b))
}

pub fn classify_json(group: &str, a: &str, b: &str) -> Result<String, Error> {
    let (g, a, b) = pair(group, a, b)?;
    let rec = classify_pair(&g, &a, &b, false);
    Ok(json!({
        "types": rec.matched_types(),
        "record": rec,
    })
    .to_string())
}

/// `A+B` with the number of representations of every element.
pub fn sumset_table_json(group: &str, a: &str, b: &str) -> Result<String, Error> {
    let (g, a, b) = pair(group, a, b)?;
    let s = sumset(&g, &a, &b)?;
    let nu = nu_profile(&g, &a, &b)?;
    let rows: Vec<_> = g
        .elements()
        .map(|x| json!({"x": format_element(&g, x), "nu": nu[x.index()]}))
        .collect();
    Ok(json!({
        "sumset": format_set(&g, &s),
        "size": s.len(),
        "r": s.len() as i64 - a.len() as i64 - b.len() as i64,
        "rows": rows,
    })
    .to_string())
}

pub fn bounds_json(group: &str, a: &str, b: &str, t: &str, k: usize) -> Result<String, Error> {
    let (g, a, b) = pair(group, a, b)?;
    let t = parse_set(&g, t)?;
    Ok(serde_json::to_string(&multiplicity_bounds(&g, &a, &b, &t, k)?).expect("bounds serialize"))
}

fn js(r: Result<String, Error>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn classify(group: &str, a: &str, b: &str) -> Result<String, JsError> {
    js(classify_json(group, a, b))
}

#[wasm_bindgen]
pub fn sumset_table(group: &str, a: &str, b: &str) -> Result<String, JsError> {
    js(sumset_table_json(group, a, b))
}

#[wasm_bindgen]
pub fn bounds(group: &str, a: &str, b: &str, t: &str, k: usize) -> Result<String, JsError> {
    js(bounds_json(group, a, b, t, k))
}
