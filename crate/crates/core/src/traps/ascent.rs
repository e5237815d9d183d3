use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{active_set, objective, QuantumSystem};
use crate::qdyn::{BasisSet, ControlGrid, SegmentChain};
use crate::traps::classify::project;
use crate::traps::{classify_point, CriticalPointReport, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AscentParams {
    /// Stop when the projected-gradient norm falls below this.
    pub gtol: f64,
    pub max_iters: usize,
    /// Sufficient-increase constant of the backtracking line search.
    pub armijo: f64,
    /// Halvings tried before the line search gives up.
    pub max_halvings: usize,
    pub tol: Tolerances,
}

impl Default for AscentParams {
    fn default() -> Self {
        AscentParams {
            gtol: 1e-8,
            max_iters: 5000,
            armijo: 1e-4,
            max_halvings: 60,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AscentStep {
    pub iter: usize,
    pub j: f64,
    pub projected_grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct AscentTrace {
    pub iterates: Vec<AscentStep>,
    pub converged: bool,
    /// The line search could not find an increase before `gtol` was reached.
    pub stalled: bool,
    pub terminal: CriticalPointReport,
}

impl AscentTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn terminal_j(&self) -> f64 {
        self.terminal.j_value
    }
}

/// Gradient with outward components at active bounds zeroed.
pub fn projected_gradient(
    system: &QuantumSystem,
    grid: &ControlGrid,
    basis: &BasisSet,
    active_tol: f64,
) -> Result<DMatrix<f64>> {
    let g = crate::landscape::gradient(system, grid, basis)?.values;
    Ok(project(&g, &active_set(grid, active_tol)))
}

fn evaluate(system: &QuantumSystem, grid: &ControlGrid, basis: &BasisSet) -> Result<(f64, DMatrix<f64>)> {
    let chain = SegmentChain::new(grid, basis)?;
    let j = objective(system, chain.total())?;
    if !j.is_finite() {
        return Err(Error::Numerical(format!("objective evaluated to {j}")));
    }
    let g = crate::landscape::gradient::gradient_from_chain(system, &chain)?.values;
    Ok((j, g))
}

fn clip(values: DMatrix<f64>, kappa: f64) -> DMatrix<f64> {
    values.map(|v| v.clamp(-kappa, kappa))
}

/// Projected gradient ascent with Armijo backtracking inside `[−κ, κ]`.
///
/// Each line search starts from a step of length κ along the gradient
/// direction and halves until sufficient increase, so the recorded objective
/// values are nondecreasing.
pub fn gradient_ascent(
    system: &QuantumSystem,
    start: &ControlGrid,
    basis: &BasisSet,
    params: &AscentParams,
) -> Result<AscentTrace> {
    let kappa = start.bound();
    let mut x = start.clone();
    let (mut j, mut g) = evaluate(system, &x, basis)?;
    let mut iterates = Vec::new();
    let mut converged = false;
    let mut stalled = false;

    for iter in 0..=params.max_iters {
        let pg = project(&g, &active_set(&x, params.tol.active));
        let pnorm = pg.norm();
        iterates.push(AscentStep {
            iter,
            j,
            projected_grad_norm: pnorm,
        });
        if pnorm < params.gtol {
            converged = true;
            break;
        }
        if iter == params.max_iters || kappa == 0.0 {
            break;
        }

        let mut step = kappa / g.norm();
        let mut accepted = None;
        for _ in 0..=params.max_halvings {
            let trial_values = clip(x.values() + &pg * step, kappa);
            let moved = &trial_values - x.values();
            let trial = x.with_values(trial_values)?;
            let (jt, gt) = evaluate(system, &trial, basis)?;
            let predicted = pg.dot(&moved);
            if predicted > 0.0 && jt >= j + params.armijo * predicted {
                accepted = Some((trial, jt, gt));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, jt, gt)) => {
                x = trial;
                j = jt;
                g = gt;
            }
            None => {
                stalled = true;
                break;
            }
        }
    }

    let terminal = classify_point(system, &x, basis, &params.tol)?;
    Ok(AscentTrace {
        iterates,
        converged,
        stalled,
        terminal,
    })
}
