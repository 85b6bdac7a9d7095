//! Browser bindings for the norm-concentration library.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript glue beyond the wasm loader itself.  The
//! serialization layer is host-testable; the `wasm_bindgen` wrappers only
//! translate errors into `JsValue`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use normconc::amgf::{lemma1_lower_bound, log_phi, PhiQuery};
use normconc::bounds::{
    compare_methods, optimize_eps_net, optimize_eps_thm2, radius_hkz, radius_scalar, radius_thm3,
    BoundMethod, BoundParams,
};

/// Caps grid sizes so a misdialed slider can't hang the browser tab.
const MAX_POINTS: u32 = 20_000;

#[derive(Serialize)]
struct Curve {
    z: Vec<f64>,
    log_phi: Vec<f64>,
    lower_bound: Vec<f64>,
}

#[derive(Serialize)]
struct MethodRow {
    method: &'static str,
    radius: f64,
    c1: Option<f64>,
    c2: Option<f64>,
    eps_used: Option<f64>,
}

#[derive(Serialize)]
struct Series {
    method: &'static str,
    radius: Vec<f64>,
}

#[derive(Serialize)]
struct Sweep {
    delta: Vec<f64>,
    series: Vec<Series>,
}

fn grid(points: u32) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    Ok((0..points).map(|i| f64::from(i) / f64::from(points - 1)).collect())
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Sphere-averaged log-MGF together with its exponential-growth lower
/// bound, on a uniform grid over `[0, z_max]`.
pub fn amgf_curve_json(n: u32, eps: f64, z_max: f64, points: u32) -> Result<String, String> {
    if !(z_max.is_finite() && z_max > 0.0) {
        return Err("z_max must be positive and finite".into());
    }
    let mut curve = Curve { z: Vec::new(), log_phi: Vec::new(), lower_bound: Vec::new() };
    for t in grid(points)? {
        let z = t * z_max;
        let query = PhiQuery::new(n, z).map_err(err)?;
        curve.z.push(z);
        curve.log_phi.push(log_phi(query).map_err(err)?.log_value);
        curve.lower_bound.push(lemma1_lower_bound(n, z, eps).map_err(err)?);
    }
    serde_json::to_string(&curve).map_err(err)
}

/// Every applicable tail-radius method at one `(n, sigma, delta)`,
/// with the constants each method used.
pub fn method_table_json(n: u32, sigma: f64, delta: f64) -> Result<String, String> {
    let params = BoundParams::new(n, sigma, delta).map_err(err)?;
    let rows: Vec<MethodRow> = compare_methods(&params)
        .map_err(err)?
        .into_iter()
        .map(|r| MethodRow {
            method: r.method.name(),
            radius: r.radius,
            c1: r.c1,
            c2: r.c2,
            eps_used: r.eps_used,
        })
        .collect();
    serde_json::to_string(&rows).map_err(err)
}

/// Radius of each method as the failure probability sweeps a log-spaced
/// range, for plotting radius-versus-confidence curves.
pub fn radius_sweep_json(
    n: u32,
    sigma: f64,
    delta_lo: f64,
    delta_hi: f64,
    points: u32,
) -> Result<String, String> {
    if !(delta_lo.is_finite() && delta_lo > 0.0 && delta_hi < 1.0 && delta_lo < delta_hi) {
        return Err("need 0 < delta_lo < delta_hi < 1".into());
    }
    let deltas: Vec<f64> =
        grid(points)?.into_iter().map(|t| delta_lo * (delta_hi / delta_lo).powf(t)).collect();
    let mut sweep = Sweep { delta: deltas.clone(), series: Vec::new() };
    let mut push = |method: BoundMethod, radii: Result<Vec<f64>, String>| -> Result<(), String> {
        sweep.series.push(Series { method: method.name(), radius: radii? });
        Ok(())
    };
    push(
        BoundMethod::Thm3,
        deltas
            .iter()
            .map(|&d| Ok(radius_thm3(&BoundParams::new(n, sigma, d).map_err(err)?).map_err(err)?.radius))
            .collect(),
    )?;
    push(
        BoundMethod::Hkz,
        deltas
            .iter()
            .map(|&d| Ok(radius_hkz(&BoundParams::new(n, sigma, d).map_err(err)?).map_err(err)?.radius))
            .collect(),
    )?;
    push(
        BoundMethod::Thm2,
        deltas.iter().map(|&d| Ok(optimize_eps_thm2(n, sigma, d).map_err(err)?.1)).collect(),
    )?;
    push(
        BoundMethod::EpsNet,
        deltas.iter().map(|&d| Ok(optimize_eps_net(n, sigma, d).map_err(err)?.1)).collect(),
    )?;
    if n == 1 {
        push(
            BoundMethod::Scalar,
            deltas
                .iter()
                .map(|&d| {
                    Ok(radius_scalar(&BoundParams::new(n, sigma, d).map_err(err)?)
                        .map_err(err)?
                        .radius)
                })
                .collect(),
        )?;
    }
    serde_json::to_string(&sweep).map_err(err)
}

#[wasm_bindgen]
pub fn amgf_curve(n: u32, eps: f64, z_max: f64, points: u32) -> Result<String, JsValue> {
    amgf_curve_json(n, eps, z_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn method_table(n: u32, sigma: f64, delta: f64) -> Result<String, JsValue> {
    method_table_json(n, sigma, delta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn radius_sweep(
    n: u32,
    sigma: f64,
    delta_lo: f64,
    delta_hi: f64,
    points: u32,
) -> Result<String, JsValue> {
    radius_sweep_json(n, sigma, delta_lo, delta_hi, points).map_err(|e| JsValue::from_str(&e))
}
