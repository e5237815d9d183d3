//! `J(e1, e2) = (2/π)(tan³e1 − tan e1 cos e2 + tan(e2/2))` on `(−π/2, π/2)²`.
//!
//! The landscape has no critical point, yet every slice `e2 = c` has one
//! interior maximum and one interior minimum in `e1`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::traps::{critical_value_census_1d, CriticalKind, Tolerances};

/// Distance kept from `±π/2`, where tan and sec² blow up.
pub const DEFAULT_MARGIN: f64 = 0.15;

const SLICE_GRID_POINTS: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Analytic2DPoint {
    e1: f64,
    e2: f64,
}

impl Analytic2DPoint {
    pub fn new(e1: f64, e2: f64, margin: f64) -> Result<Self> {
        check_coordinate(e1, margin)?;
        check_coordinate(e2, margin)?;
        Ok(Analytic2DPoint { e1, e2 })
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }
}

fn check_coordinate(x: f64, margin: f64) -> Result<()> {
    if !(margin > 0.0) {
        return Err(Error::domain(format!("margin must be positive, got {margin}")));
    }
    if !(x.abs() <= FRAC_PI_2 - margin) {
        return Err(Error::domain(format!(
            "coordinate {x} outside [−π/2 + {margin}, π/2 − {margin}]"
        )));
    }
    Ok(())
}

fn eval_raw(e1: f64, e2: f64) -> f64 {
    let t = e1.tan();
    FRAC_2_PI * (t * t * t - t * e2.cos() + (0.5 * e2).tan())
}

fn d1_raw(e1: f64, e2: f64) -> f64 {
    let t = e1.tan();
    FRAC_2_PI * (1.0 + t * t) * (3.0 * t * t - e2.cos())
}

fn d2_raw(e1: f64, e2: f64) -> f64 {
    let half = (0.5 * e2).cos();
    FRAC_2_PI * (e1.tan() * e2.sin() + 0.5 / (half * half))
}

pub fn analytic2d_eval(p: &Analytic2DPoint) -> f64 {
    eval_raw(p.e1, p.e2)
}

pub fn analytic2d_gradient(p: &Analytic2DPoint) -> (f64, f64) {
    (d1_raw(p.e1, p.e2), d2_raw(p.e1, p.e2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceExtrema {
    pub c: f64,
    pub max_loc: f64,
    pub max_val: f64,
    pub min_loc: f64,
    pub min_val: f64,
}

/// Closed-form extrema of `e1 ↦ J(e1, c)`: `tan e1 = ∓√(cos c / 3)`, with
/// values `(2/π)(±(2/(3√3)) cos^{3/2} c + tan(c/2))`.
pub fn slice_critical_points(c: f64, margin: f64) -> Result<SliceExtrema> {
    check_coordinate(c, margin)?;
    let root = (c.cos() / 3.0).sqrt();
    let peak = 2.0 / (3.0 * 3f64.sqrt()) * c.cos().powf(1.5);
    let shift = (0.5 * c).tan();
    Ok(SliceExtrema {
        c,
        max_loc: (-root).atan(),
        max_val: FRAC_2_PI * (peak + shift),
        min_loc: root.atan(),
        min_val: FRAC_2_PI * (-peak + shift),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceRow {
    pub closed_form: SliceExtrema,
    /// Maxima and minima found by the numerical 1D census of the slice.
    pub census_max_count: usize,
    pub census_min_count: usize,
    pub census_max_loc: f64,
    pub census_max_val: f64,
    pub census_min_loc: f64,
    pub census_min_val: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceCensus {
    pub margin: f64,
    pub c_values: Vec<f64>,
    pub per_slice: Vec<SliceRow>,
}

impl SliceCensus {
    /// Largest closed-form vs census disagreement in location and in value.
    pub fn max_disagreement(&self) -> (f64, f64) {
        self.per_slice.iter().fold((0.0f64, 0.0f64), |(dl, dv), r| {
            let cf = &r.closed_form;
            (
                dl.max((cf.max_loc - r.census_max_loc).abs())
                    .max((cf.min_loc - r.census_min_loc).abs()),
                dv.max((cf.max_val - r.census_max_val).abs())
                    .max((cf.min_val - r.census_min_val).abs()),
            )
        })
    }
}

/// Sweeps `steps` evenly spaced slices over `[c_min, c_max]`. Each slice is
/// solved in closed form and independently by a bracketing census in `e1`;
/// a slice without exactly one maximum and one minimum is an error.
pub fn slice_census_2d(c_min: f64, c_max: f64, steps: usize, margin: f64) -> Result<SliceCensus> {
    check_coordinate(c_min, margin)?;
    check_coordinate(c_max, margin)?;
    if steps == 0 || c_min > c_max {
        return Err(Error::domain("slice sweep needs steps >= 1 and c_min <= c_max"));
    }
    let c_values: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                c_min
            } else if i == steps - 1 {
                c_max
            } else {
                c_min + (c_max - c_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();

    let rows = crate::par::map_indexed(steps, |i| slice_row(c_values[i], margin));
    let per_slice = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SliceCensus {
        margin,
        c_values,
        per_slice,
    })
}

fn slice_row(c: f64, margin: f64) -> Result<SliceRow> {
    let closed_form = slice_critical_points(c, margin)?;
    let lim = FRAC_PI_2 - margin;
    let census = critical_value_census_1d(
        |e1| eval_raw(e1, c),
        |e1| d1_raw(e1, c),
        (-lim, lim),
        SLICE_GRID_POINTS,
        &Tolerances::default(),
    )?;
    let pick = |kind| {
        census
            .kinds
            .iter()
            .zip(census.critical_points.iter().zip(&census.critical_values))
            .filter(|(k, _)| **k == kind)
            .map(|(_, (&x, &v))| (x, v))
            .collect::<Vec<_>>()
    };
    let maxima = pick(CriticalKind::Max);
    let minima = pick(CriticalKind::Min);
    if maxima.len() != 1 || minima.len() != 1 {
        return Err(Error::Numerical(format!(
            "slice c = {c}: census found {} maxima and {} minima, expected one of each",
            maxima.len(),
            minima.len()
        )));
    }
    Ok(SliceRow {
        closed_form,
        census_max_count: maxima.len(),
        census_min_count: minima.len(),
        census_max_loc: maxima[0].0,
        census_max_val: maxima[0].1,
        census_min_loc: minima[0].0,
        census_min_val: minima[0].1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientScan {
    pub min_grad_norm: f64,
    pub argmin: (f64, f64),
    pub grid_steps: usize,
    pub margin: f64,
}

/// Minimum of `‖∇f‖` over a `grid_steps × grid_steps` uniform grid of the
/// margin-restricted square.
pub fn min_gradient_norm_scan<G>(grad: G, grid_steps: usize, margin: f64) -> Result<GradientScan>
where
    G: Fn(f64, f64) -> (f64, f64) + Sync + Send,
{
    if grid_steps < 10 {
        return Err(Error::domain(format!("scan needs grid_steps >= 10, got {grid_steps}")));
    }
    if !(margin > 0.0 && margin < FRAC_PI_2) {
        return Err(Error::domain(format!("margin must lie in (0, π/2), got {margin}")));
    }
    let lim = FRAC_PI_2 - margin;
    let coord = |i: usize| -lim + 2.0 * lim * i as f64 / (grid_steps - 1) as f64;
    let rows = crate::par::map_indexed(grid_steps, |i| {
        let e1 = coord(i);
        (0..grid_steps)
            .map(|k| {
                let e2 = coord(k);
                let (a, b) = grad(e1, e2);
                (a.hypot(b), (e1, e2))
            })
            .fold(
                (f64::INFINITY, (0.0, 0.0)),
                |best, cur| if cur.0 < best.0 { cur } else { best },
            )
    });
    let (min_grad_norm, argmin) =
        rows.into_iter().fold(
            (f64::INFINITY, (0.0, 0.0)),
            |best, cur| if cur.0 < best.0 { cur } else { best },
        );
    Ok(GradientScan {
        min_grad_norm,
        argmin,
        grid_steps,
        margin,
    })
}

pub fn analytic2d_trap_free_scan(grid_steps: usize, margin: f64) -> Result<GradientScan> {
    min_gradient_norm_scan(|a, b| (d1_raw(a, b), d2_raw(a, b)), grid_steps, margin)
}
