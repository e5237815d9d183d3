use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::Result;
use crate::landscape::{active_set, ActiveSide, QuantumSystem};
use crate::qdyn::{BasisSet, ControlGrid, SegmentChain};
use crate::traps::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    InteriorMax,
    InteriorMin,
    /// Saddles, boundary saddles, and every degenerate critical point.
    InteriorSaddle,
    BoundaryTrapMax,
    BoundaryTrapMin,
    Regular,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::InteriorMax => "interior-max",
            Classification::InteriorMin => "interior-min",
            Classification::InteriorSaddle => "interior-saddle",
            Classification::BoundaryTrapMax => "boundary-trap-max",
            Classification::BoundaryTrapMin => "boundary-trap-min",
            Classification::Regular => "regular",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointReport {
    pub location: ControlGrid,
    pub j_value: f64,
    pub gradient: DMatrix<f64>,
    pub grad_norm_projected: f64,
    pub active_set: Vec<(usize, usize, ActiveSide)>,
    pub classification: Classification,
    /// Spectrum of the finite-difference Hessian restricted to free coordinates, ascending.
    pub hessian_eigenvalues: Vec<f64>,
    /// Largest entry of `|H − Hᵀ|` before symmetrization.
    pub hessian_asymmetry: f64,
    /// Set when the first- and second-order tests are inconclusive: a zero
    /// Hessian eigenvalue, or an active control with vanishing gradient.
    pub degenerate: bool,
    /// Smallest outward gradient component over the active set (positive
    /// means every active control strictly pushes outward).
    pub min_outward_component: Option<f64>,
}

fn outward_component(g: f64, side: ActiveSide) -> f64 {
    match side {
        ActiveSide::Upper => g,
        ActiveSide::Lower => -g,
        ActiveSide::Pinned => g.abs(),
    }
}

pub(crate) fn project(gradient: &DMatrix<f64>, active: &[(usize, usize, ActiveSide)]) -> DMatrix<f64> {
    let mut p = gradient.clone();
    for &(j, z, side) in active {
        let g = p[(j, z)];
        let outward = match side {
            ActiveSide::Upper => g > 0.0,
            ActiveSide::Lower => g < 0.0,
            ActiveSide::Pinned => true,
        };
        if outward {
            p[(j, z)] = 0.0;
        }
    }
    p
}

fn gradient_at(system: &QuantumSystem, grid: &ControlGrid, basis: &BasisSet) -> Result<DMatrix<f64>> {
    let chain = SegmentChain::new(grid, basis)?;
    Ok(crate::landscape::gradient::gradient_from_chain(system, &chain)?.values)
}

/// First- and second-order classification of a point of the box-constrained landscape.
pub fn classify_point(
    system: &QuantumSystem,
    grid: &ControlGrid,
    basis: &BasisSet,
    tol: &Tolerances,
) -> Result<CriticalPointReport> {
    let chain = SegmentChain::new(grid, basis)?;
    let j_value = crate::landscape::objective(system, chain.total())?;
    let gradient = crate::landscape::gradient::gradient_from_chain(system, &chain)?.values;
    let active = active_set(grid, tol.active);
    let grad_norm_projected = project(&gradient, &active).norm();

    let mut is_active = vec![false; grid.len()];
    for &(j, z, _) in &active {
        is_active[grid.flat_index(j, z)] = true;
    }
    let free: Vec<usize> = (0..grid.len()).filter(|&k| !is_active[k]).collect();

    let (hessian_eigenvalues, hessian_asymmetry) = free_hessian(system, grid, basis, &free, tol)?;

    let min_outward_component = active
        .iter()
        .map(|&(j, z, side)| outward_component(gradient[(j, z)], side))
        .reduce(f64::min);

    let zero_eig = hessian_eigenvalues.iter().any(|l| l.abs() <= tol.hess_zero);
    let weakly_active = active
        .iter()
        .any(|&(j, z, side)| side != ActiveSide::Pinned && gradient[(j, z)].abs() <= tol.grad);
    let degenerate = grad_norm_projected <= tol.grad && (zero_eig || weakly_active);

    let classification = if grad_norm_projected > tol.grad {
        Classification::Regular
    } else if degenerate {
        Classification::InteriorSaddle
    } else {
        let all_neg = hessian_eigenvalues.iter().all(|&l| l < 0.0);
        let all_pos = hessian_eigenvalues.iter().all(|&l| l > 0.0);
        if active.is_empty() {
            if all_neg {
                Classification::InteriorMax
            } else if all_pos {
                Classification::InteriorMin
            } else {
                Classification::InteriorSaddle
            }
        } else {
            // Past the projected-gradient test every active component is
            // outward (>= −tol.grad), and none is near zero, so the active
            // directions are strictly descending from the boundary.
            let pushes_out = active
                .iter()
                .all(|&(j, z, side)| outward_component(gradient[(j, z)], side) >= -tol.grad);
            if all_neg && pushes_out {
                Classification::BoundaryTrapMax
            } else {
                Classification::InteriorSaddle
            }
        }
    };

    Ok(CriticalPointReport {
        location: grid.clone(),
        j_value,
        gradient,
        grad_norm_projected,
        active_set: active,
        classification,
        hessian_eigenvalues,
        hessian_asymmetry,
        degenerate,
        min_outward_component,
    })
}

/// Hessian on the `free` flat coordinates from central differences of the
/// analytic gradient; returns its ascending spectrum and the pre-symmetrization
/// asymmetry.
fn free_hessian(
    system: &QuantumSystem,
    grid: &ControlGrid,
    basis: &BasisSet,
    free: &[usize],
    tol: &Tolerances,
) -> Result<(Vec<f64>, f64)> {
    let m = free.len();
    if m == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let kappa = grid.bound();
    let h = if kappa > 0.0 {
        tol.hess_step_rel * kappa
    } else {
        tol.hess_step_rel
    };
    let base = grid.to_flat();
    let mut hess = DMatrix::<f64>::zeros(m, m);
    for (col, &k) in free.iter().enumerate() {
        let mut plus = base.clone();
        plus[k] += h;
        let mut minus = base.clone();
        minus[k] -= h;
        let gp = gradient_at(system, &grid.widened(grid.flat_to_matrix(&plus), h)?, basis)?;
        let gm = gradient_at(system, &grid.widened(grid.flat_to_matrix(&minus), h)?, basis)?;
        for (row, &r) in free.iter().enumerate() {
            let (j, z) = grid.unflat_index(r);
            hess[(row, col)] = (gp[(j, z)] - gm[(j, z)]) / (2.0 * h);
        }
    }
    let asym = (&hess - hess.transpose()).abs().max();
    let sym = (&hess + hess.transpose()) * 0.5;
    let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok((eig, asym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, identity, CMat};
    use crate::qdyn::build_su_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_landscape_is_flagged_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = build_su_basis(2).unwrap();
        let sys = QuantumSystem::random(2, &mut rng)
            .unwrap()
            .with_observable(identity(2))
            .unwrap();
        let g = ControlGrid::random_uniform(3, 2, 1.0, 1.0, &mut rng).unwrap();
        let r = classify_point(&sys, &g, &b, &Tolerances::default()).unwrap();
        assert_eq!(r.classification, Classification::InteriorSaddle);
        assert!(r.degenerate);
        assert_eq!(r.hessian_eigenvalues.len(), 6);
        assert!(r.hessian_eigenvalues.iter().all(|l| l.abs() < 1e-10));
    }

    #[test]
    fn random_interior_point_is_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = build_su_basis(2).unwrap();
        let sys = QuantumSystem::random(2, &mut rng).unwrap();
        let g = ControlGrid::random_uniform(3, 4, 1.0, 1.0, &mut rng).unwrap();
        let r = classify_point(&sys, &g, &b, &Tolerances::default()).unwrap();
        assert_eq!(r.classification, Classification::Regular);
        assert!(r.grad_norm_projected > 1e-3);
        assert_eq!(r.hessian_eigenvalues.len(), 12);
        assert!(r.hessian_asymmetry < 1e-5);
    }

    #[test]
    fn global_min_with_flat_direction_is_degenerate() {
        // ρ0 = |0⟩⟨0|, Ô = −σ3: the zero grid attains j_min = −1. σ1 and σ2
        // curve upward, σ3 commutes with ρ0 and is flat.
        let b = build_su_basis(2).unwrap();
        let rho = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]));
        let sys = QuantumSystem::new(rho, -b.elements()[2].clone()).unwrap();
        let g = ControlGrid::zeros(3, 1, 1.0, 1.0).unwrap();
        let r = classify_point(&sys, &g, &b, &Tolerances::default()).unwrap();
        assert!(r.grad_norm_projected < 1e-12);
        assert!(r.degenerate);
        assert_eq!(r.hessian_eigenvalues.len(), 3);
        assert!(r.hessian_eigenvalues[1] > 0.1 && r.hessian_eigenvalues[2] > 0.1);
    }
}
