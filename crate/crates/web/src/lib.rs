//! Browser bindings: qubit polytope analysis, Fibonacci brackets and planar
//! measurement brackets. Every export returns a JSON string.

use serde_json::{json, Value};
use steerlp::lp::{measurement_robustness, LpOptions};
use steerlp::measurements::{bloch_vector, fibonacci_qubit, planar_bound, planar_measurements, PlanarAngles};
use steerlp::polytope::{analyze, polygon, rational_pure_states, sphere_polytope, FacetOptions, SphereKind, StatePolytope};
use steerlp::sdp::{exact_robustness_measurements, SdpOptions};
use wasm_bindgen::prelude::*;

/// Largest polytope the page will enumerate facets for.
const MAX_VERTICES: usize = 2000;

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn qubit_polytope(kind: &str, size: usize) -> steerlp::Result<StatePolytope> {
    let p = match kind {
        "rational" => rational_pure_states(2, u32::try_from(size).unwrap_or(u32::MAX))?,
        "icosphere" => sphere_polytope(SphereKind::Icosphere, size)?,
        "fibonacci" => sphere_polytope(SphereKind::Fibonacci, size)?,
        other => return Err(steerlp::Error::InvalidParameter(format!("unknown polytope kind '{other}'"))),
    };
    if p.len() > MAX_VERTICES {
        return Err(steerlp::Error::CapExceeded { what: "vertex count", value: p.len() as u128, cap: MAX_VERTICES as u128 });
    }
    Ok(analyze(&p, &FacetOptions::default())?.0)
}

pub fn polytope_summary_value(kind: &str, size: usize) -> steerlp::Result<Value> {
    let p = qubit_polytope(kind, size)?;
    let bloch: Vec<[f64; 3]> = p.vertices().iter().map(bloch_vector).collect();
    Ok(json!({
        "vertices": p.len(),
        "facets": p.facets().map_or(0, |f| f.len()),
        "r": p.shrinking_factor(),
        "bloch": bloch,
    }))
}

pub fn fibonacci_bracket_value(m: usize, kind: &str, size: usize, oracle: bool) -> steerlp::Result<Value> {
    let p = qubit_polytope(kind, size)?;
    let set = fibonacci_qubit(m)?;
    let res = measurement_robustness(&set, &p, &LpOptions { certificate: false, ..Default::default() })?;
    let exact = if oracle { Some(exact_robustness_measurements(&set, &SdpOptions::default())?.eta) } else { None };
    Ok(json!({
        "lower": finite(res.lower),
        "upper": finite(res.upper),
        "r": res.r_used,
        "exact": exact,
        "status": res.status.as_str(),
    }))
}

pub fn planar_bracket_value(angles: &str, sides: usize) -> steerlp::Result<Value> {
    let raw = angles
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| steerlp::Error::InvalidParameter(format!("angle '{s}': {e}"))))
        .collect::<steerlp::Result<Vec<f64>>>()?;
    let angles = PlanarAngles::new(&raw)?;
    let res = measurement_robustness(
        &planar_measurements(&angles)?,
        &polygon(sides)?,
        &LpOptions { certificate: false, ..Default::default() },
    )?;
    Ok(json!({
        "lower": finite(res.lower),
        "upper": finite(res.upper),
        "planar_bound": planar_bound(&angles),
        "angles": angles.angles(),
    }))
}

fn to_js(v: steerlp::Result<Value>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// Vertex count, facet count, shrinking factor and Bloch vectors of a qubit polytope.
/// `kind` is `rational` (size = q), `icosphere` (size = level) or `fibonacci` (size = n).
#[wasm_bindgen]
pub fn polytope_summary(kind: &str, size: usize) -> Result<String, JsError> {
    to_js(polytope_summary_value(kind, size))
}

/// LP bracket for `m` Fibonacci qubit measurements, with the exact value when `oracle` is set.
#[wasm_bindgen]
pub fn fibonacci_bracket(m: usize, kind: &str, size: usize, oracle: bool) -> Result<String, JsError> {
    to_js(fibonacci_bracket_value(m, kind, size, oracle))
}

/// LP bracket for coplanar measurements over a regular polygon, next to the closed form.
#[wasm_bindgen]
pub fn planar_bracket(angles: &str, sides: usize) -> Result<String, JsError> {
    to_js(planar_bracket_value(angles, sides))
}
