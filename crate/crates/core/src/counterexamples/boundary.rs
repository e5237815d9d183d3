use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landscape::{kappa_threshold, objective_of_grid, objective_range, QuantumSystem};
use crate::linalg::{c64, CMat};
use crate::qdyn::{build_su_basis, BasisSet, ControlGrid};

/// κ = π/(√3 T), the bound at which the corner rotation angle α = 2√3Tκ is 2π.
pub fn full_turn_kappa(horizon: f64) -> f64 {
    PI / (3f64.sqrt() * horizon)
}

/// `sin(α + π/3) σ1 + sin(α − π/3) σ2 + sin(α) σ3`.
pub fn trap_observable(alpha: f64, basis: &BasisSet) -> CMat {
    let s = basis.elements();
    &s[0] * c64((alpha + PI / 3.0).sin(), 0.0)
        + &s[1] * c64((alpha - PI / 3.0).sin(), 0.0)
        + &s[2] * c64(alpha.sin(), 0.0)
}

/// Two-level system with ρ0 = ½(I + σ3) held at the all-`+κ` corner of the control box.
#[derive(Debug, Clone)]
pub struct BoundaryTrapInstance {
    pub horizon: f64,
    pub segments: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub kappa_thr: f64,
    pub basis: BasisSet,
    pub system: QuantumSystem,
    pub grid: ControlGrid,
}

impl BoundaryTrapInstance {
    /// Same corner, different observable.
    pub fn with_observable(&self, observable: CMat) -> Result<Self> {
        Ok(BoundaryTrapInstance {
            system: self.system.with_observable(observable)?,
            ..self.clone()
        })
    }
}

/// Builds the instance, rejecting `(T, Z, κ)` that violate `T/Z < 2π/(2√3κ)`.
pub fn boundary_trap_instance(horizon: f64, segments: usize, kappa: f64) -> Result<BoundaryTrapInstance> {
    let basis = build_su_basis(2)?;
    let thr = kappa_threshold(&basis, horizon, segments)?;
    if !(kappa >= 0.0) {
        return Err(Error::domain(format!("bound kappa must be >= 0, got {kappa}")));
    }
    if !thr.admits(kappa) {
        return Err(Error::ThresholdViolated {
            kappa,
            threshold: thr.kappa,
        });
    }
    let alpha = 2.0 * 3f64.sqrt() * horizon * kappa;
    let rho0 = (CMat::identity(2, 2) + &basis.elements()[2]) * c64(0.5, 0.0);
    let system = QuantumSystem::new(rho0, trap_observable(alpha, &basis))?;
    let grid = ControlGrid::upper_corner(3, segments, horizon, kappa)?;
    Ok(BoundaryTrapInstance {
        horizon,
        segments,
        kappa,
        alpha,
        kappa_thr: thr.kappa,
        basis,
        system,
        grid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrapOrder {
    /// Every gradient component at the corner points strictly outward.
    FirstOrder,
    /// Some component vanishes; the sampled inward test decides alone.
    SecondOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapVerification {
    pub is_trap: bool,
    pub j_at_corner: f64,
    pub max_inward_gain: f64,
    pub j_global_max: f64,
    pub min_outward_component: f64,
    pub order: TrapOrder,
    pub samples: usize,
    pub radius: f64,
}

const GAIN_TOL: f64 = 1e-10;
const SUBOPTIMAL_GAP: f64 = 1e-6;

/// Samples `samples` perturbations uniformly on the inward orthant of the
/// sphere of radius `radius` around the corner and records the largest
/// increase of J. The corner is a trap when no sample gains more than 1e−10
/// and J there is below the global maximum.
pub fn verify_boundary_trap(
    inst: &BoundaryTrapInstance,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<TrapVerification> {
    if !(radius > 0.0 && radius < inst.kappa) {
        return Err(Error::domain(format!(
            "radius must lie in (0, kappa = {}), got {radius}",
            inst.kappa
        )));
    }
    let grid = &inst.grid;
    let j_at_corner = objective_of_grid(&inst.system, grid, &inst.basis)?;
    let j_global_max = objective_range(&inst.system).j_max;
    let grad = crate::landscape::gradient(&inst.system, grid, &inst.basis)?;
    let min_outward_component = grad.values.min();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let directions: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| -f64::abs(StandardNormal.sample(&mut rng))).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x *= radius / norm);
            v
        })
        .collect();

    let base = grid.to_flat();
    let gains = crate::par::map_indexed(directions.len(), |i| -> Result<f64> {
        let moved: Vec<f64> = base.iter().zip(&directions[i]).map(|(b, d)| b + d).collect();
        let g = grid.with_values(DMatrix::from_row_slice(grid.rows(), grid.segments(), &moved))?;
        Ok(objective_of_grid(&inst.system, &g, &inst.basis)? - j_at_corner)
    });
    let mut max_inward_gain = f64::NEG_INFINITY;
    for g in gains {
        max_inward_gain = max_inward_gain.max(g?);
    }

    let is_trap = max_inward_gain <= GAIN_TOL && j_at_corner < j_global_max - SUBOPTIMAL_GAP;
    Ok(TrapVerification {
        is_trap,
        j_at_corner,
        max_inward_gain,
        j_global_max,
        min_outward_component,
        order: if min_outward_component > 1e-8 {
            TrapOrder::FirstOrder
        } else {
            TrapOrder::SecondOrder
        },
        samples,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::qdyn::propagate;

    #[test]
    fn full_turn_instance_observable() {
        let inst = boundary_trap_instance(1.0, 4, full_turn_kappa(1.0)).unwrap();
        assert!((inst.alpha - 2.0 * PI).abs() < 1e-14);
        let h = 3f64.sqrt() / 2.0;
        let o = inst.system.observable();
        // (√3/2)σ1 − (√3/2)σ2
        assert!((o[(0, 1)] - c64(h, h)).norm() < 1e-14);
        assert!((o[(1, 0)] - c64(h, -h)).norm() < 1e-14);
        assert!(o[(0, 0)].norm() < 1e-14 && o[(1, 1)].norm() < 1e-14);
        assert!((propagate(&inst.grid, &inst.basis).unwrap().total + identity(2)).norm() < 1e-12);
    }

    #[test]
    fn threshold_equality_is_rejected() {
        let err = boundary_trap_instance(1.0, 1, full_turn_kappa(1.0)).unwrap_err();
        match err {
            Error::ThresholdViolated { threshold, .. } => assert!((threshold - full_turn_kappa(1.0)).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("kappa_thr"));
    }

    #[test]
    fn zero_bound_is_well_formed() {
        let inst = boundary_trap_instance(1.0, 4, 0.0).unwrap();
        assert_eq!(inst.alpha, 0.0);
        assert!(inst.grid.values().iter().all(|&v| v == 0.0));
        let h = 3f64.sqrt() / 2.0;
        assert!((inst.system.observable()[(0, 1)] - c64(h, h)).norm() < 1e-14);
        assert!(verify_boundary_trap(&inst, 10, 1e-3, 0).is_err());
    }

    #[test]
    fn sigma3_observable_is_not_trapped() {
        let inst = boundary_trap_instance(1.0, 4, 0.7).unwrap();
        let other = inst.with_observable(inst.basis.elements()[2].clone()).unwrap();
        let v = verify_boundary_trap(&other, 200, 1e-3 * 0.7, 1).unwrap();
        assert!(!v.is_trap);
    }
}
