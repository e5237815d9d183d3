//! Browser bindings for landscape-lab. Every export returns a JSON string.

use std::f64::consts::FRAC_PI_2;

use landscape_lab::counterexamples::{
    analytic2d_eval, boundary_trap_instance, full_turn_kappa, slice_critical_points, verify_boundary_trap,
    Analytic2DPoint,
};
use landscape_lab::landscape::objective_of_grid;
use landscape_lab::traps::{critical_value_census_1d, CriticalKind, Tolerances};
use serde_json::json;
use wasm_bindgen::prelude::*;

type RealFn = fn(f64) -> f64;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// J on a `steps × steps` grid of the sliced analytic landscape, plus the
/// closed-form slice maxima and minima for every column.
#[wasm_bindgen]
pub fn analytic_landscape(steps: usize, margin: f64) -> Result<String, JsError> {
    js(analytic_landscape_json(steps, margin))
}

/// Boundary-trap check at the upper corner for `κ = scale · π/(√3T)`, with
/// a J profile along the diagonal `ε = t·κ` for `t` in `[−1, 1]`.
#[wasm_bindgen]
pub fn boundary_trap(horizon: f64, segments: usize, scale: f64, samples: usize, seed: u32) -> Result<String, JsError> {
    js(boundary_trap_json(horizon, segments, scale, samples, seed as u64))
}

/// Critical points of `sin`, `sinc` or `cubic` on `[a, b]`.
#[wasm_bindgen]
pub fn census(function: &str, a: f64, b: f64, grid_points: usize) -> Result<String, JsError> {
    js(census_json(function, a, b, grid_points))
}

pub fn analytic_landscape_json(steps: usize, margin: f64) -> Result<String, String> {
    if !(2..=400).contains(&steps) {
        return Err(format!("steps must lie in [2, 400], got {steps}"));
    }
    if !(margin > 0.0 && margin < FRAC_PI_2) {
        return Err(format!("margin must lie in (0, π/2), got {margin}"));
    }
    let lim = FRAC_PI_2 - margin;
    let axis: Vec<f64> = (0..steps)
        .map(|i| -lim + 2.0 * lim * i as f64 / (steps - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(steps * steps);
    for &e2 in &axis {
        for &e1 in &axis {
            let p = Analytic2DPoint::new(e1, e2, margin).map_err(|e| e.to_string())?;
            values.push(analytic2d_eval(&p));
        }
    }
    let slices = axis
        .iter()
        .map(|&c| slice_critical_points(c, margin).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "axis": axis,
        "values": values,
        "max_loc": slices.iter().map(|s| s.max_loc).collect::<Vec<_>>(),
        "min_loc": slices.iter().map(|s| s.min_loc).collect::<Vec<_>>(),
    })
    .to_string())
}

pub fn boundary_trap_json(
    horizon: f64,
    segments: usize,
    scale: f64,
    samples: usize,
    seed: u64,
) -> Result<String, String> {
    let kappa = scale * full_turn_kappa(horizon);
    let inst = boundary_trap_instance(horizon, segments, kappa).map_err(|e| e.to_string())?;
    let v = verify_boundary_trap(&inst, samples, 1e-3 * kappa, seed).map_err(|e| e.to_string())?;
    let ts: Vec<f64> = (0..=100).map(|i| -1.0 + i as f64 / 50.0).collect();
    let profile = ts
        .iter()
        .map(|&t| {
            let grid = inst.grid.with_values(inst.grid.values() * t)?;
            objective_of_grid(&inst.system, &grid, &inst.basis)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "kappa": kappa,
        "kappa_thr": inst.kappa_thr,
        "alpha": inst.alpha,
        "is_trap": v.is_trap,
        "j_at_corner": v.j_at_corner,
        "j_global_max": v.j_global_max,
        "max_inward_gain": v.max_inward_gain,
        "t": ts,
        "profile": profile,
    })
    .to_string())
}

pub fn census_json(function: &str, a: f64, b: f64, grid_points: usize) -> Result<String, String> {
    let (f, df): (RealFn, RealFn) = match function {
        "sin" => (f64::sin, f64::cos),
        "sinc" => (|x| x.sin() / x, |x| (x * x.cos() - x.sin()) / (x * x)),
        "cubic" => (|x| x * x * x - 3.0 * x, |x| 3.0 * x * x - 3.0),
        other => return Err(format!("unknown function '{other}'")),
    };
    if grid_points > 1_000_000 {
        return Err("grid_points is capped at 1e6".into());
    }
    let r = critical_value_census_1d(f, df, (a, b), grid_points, &Tolerances::default()).map_err(|e| e.to_string())?;
    let curve: Vec<[f64; 2]> = (0..=400)
        .map(|i| {
            let x = a + (b - a) * i as f64 / 400.0;
            [x, f(x)]
        })
        .collect();
    Ok(json!({
        "points": r.critical_points,
        "values": r.critical_values,
        "kinds": r.kinds.iter().map(|k| if *k == CriticalKind::Max { "max" } else { "min" }).collect::<Vec<_>>(),
        "distinct_values": r.distinct_values,
        "curve": curve,
    })
    .to_string())
}
