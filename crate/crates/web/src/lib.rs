//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a flat `Float64Array`; the page reshapes it into
//! rows. The `*_rows` functions hold the logic and are callable natively.

use wasm_bindgen::prelude::*;

use hsdp_cli::figures::{compare_rows, grid, mixing_rows};
use hsdp_core::privacy::{dasgupta_bound, re_ldp_bound};

/// `points` rows of `[t, dpi, linear, nonlinear]` over `t ∈ [0, 1]`.
pub fn sdpi_rows(gamma: f64, gamma_prime: f64, delta: f64, points: usize) -> Result<Vec<f64>, String> {
    let ts = grid(0.0, 1.0, points).map_err(|e| e.to_string())?;
    let rows = compare_rows(gamma, gamma_prime, delta, &ts).map_err(|e| e.to_string())?;
    Ok(rows.iter().flat_map(|r| [r.t, r.dpi, r.linear, r.nonlinear]).collect())
}

/// `points` rows of `[beta, linear, nonlinear]` over `β ∈ [0, 1]`; an
/// unbounded mixing time is `NaN`.
pub fn mixing_rows_flat(gamma: f64, gamma_prime: f64, delta: f64, points: usize) -> Result<Vec<f64>, String> {
    let betas = grid(0.0, 1.0, points).map_err(|e| e.to_string())?;
    let rows = mixing_rows(gamma, gamma_prime, delta, &betas).map_err(|e| e.to_string())?;
    let n = |v: Option<u64>| v.map_or(f64::NAN, |k| k as f64);
    Ok(rows.iter().flat_map(|r| [r.beta, n(r.linear), n(r.nonlinear)]).collect())
}

/// `[ours, prior]` relative-entropy bounds for an `(ε, δ)` mechanism with
/// `λ = m`; the prior bound is `NaN` where it is undefined.
pub fn ldp_pair(eps: f64, delta: f64, tau: f64, lambda: f64) -> Result<Vec<f64>, String> {
    let ours = re_ldp_bound(eps, delta, tau, lambda).map_err(|e| e.to_string())?;
    let prior = dasgupta_bound(eps, delta, tau, lambda).unwrap_or(f64::NAN);
    Ok(vec![ours, prior])
}

#[wasm_bindgen]
pub fn sdpi_curves(gamma: f64, gamma_prime: f64, delta: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    sdpi_rows(gamma, gamma_prime, delta, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mixing_times(gamma: f64, gamma_prime: f64, delta: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    mixing_rows_flat(gamma, gamma_prime, delta, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ldp_bounds(eps: f64, delta: f64, tau: f64, lambda: f64) -> Result<Vec<f64>, JsValue> {
    ldp_pair(eps, delta, tau, lambda).map_err(|e| JsValue::from_str(&e))
}
