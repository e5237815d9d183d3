use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c64, sorted_eigenvalues, CMat};
use crate::qdyn::{BasisSet, ControlGrid, SegmentChain};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Differential of ε ↦ U_T(ε), left-translated to su(N).
///
/// Row `(j, z)` (flat index `j·Z + z`) holds the coordinates of
/// `−i U_T† ∂U_T/∂ε_{j,z}` in the orthonormal basis `B_k/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentMap {
    pub rows: DMatrix<f64>,
}

impl TangentMap {
    pub fn n_controls(&self) -> usize {
        self.rows.nrows()
    }

    /// Dimension of su(N), N² − 1.
    pub fn algebra_dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn row(&self, k: usize) -> Vec<f64> {
        self.rows.row(k).iter().copied().collect()
    }

    /// Reassemble row `k` as a Hermitian traceless matrix.
    pub fn row_as_matrix(&self, k: usize, basis: &BasisSet) -> CMat {
        basis.from_coordinates(&self.row(k))
    }
}

pub fn psi_tangent_map(grid: &ControlGrid, basis: &BasisSet) -> Result<TangentMap> {
    let chain = SegmentChain::new(grid, basis)?;
    tangent_from_chain(grid, &chain)
}

pub(crate) fn tangent_from_chain(grid: &ControlGrid, chain: &SegmentChain<'_>) -> Result<TangentMap> {
    let basis = chain.basis();
    let u_dag = chain.total().adjoint();
    let mut rows = DMatrix::zeros(grid.len(), basis.len());
    for j in 0..grid.rows() {
        for z in 0..grid.segments() {
            let x = &u_dag * chain.derivative(j, z)? * c64(0.0, -1.0);
            let coords = basis.coordinates(&x);
            let k = grid.flat_index(j, z);
            for (c, v) in coords.into_iter().enumerate() {
                rows[(k, c)] = v;
            }
        }
    }
    Ok(TangentMap { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub surjective: bool,
    pub singular_values: Vec<f64>,
}

/// Numerical rank of the tangent map: singular values above `tol` times the
/// largest one. Locally surjective iff the rank equals N² − 1.
pub fn local_surjectivity_rank(tm: &TangentMap, tol: f64) -> RankReport {
    let mut singular_values: Vec<f64> = if tm.rows.is_empty() {
        Vec::new()
    } else {
        tm.rows
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let top = singular_values.first().copied().unwrap_or(0.0);
    let rank = if top > 0.0 {
        singular_values.iter().filter(|&&s| s > tol * top).count()
    } else {
        0
    };
    RankReport {
        rank,
        surjective: rank == tm.algebra_dim(),
        singular_values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaThreshold {
    /// Supremum of admissible κ: the condition holds for every κ strictly below it.
    pub kappa: f64,
    /// True when the spectral spread used is the exact worst case (N = 2);
    /// otherwise it is an upper bound and `kappa` is conservative.
    pub exact: bool,
}

impl KappaThreshold {
    pub fn admits(&self, kappa: f64) -> bool {
        kappa < self.kappa * (1.0 - 1e-12)
    }
}

/// Largest κ with `T/Z < 2π / (E_max(κ) − E_min(κ))` over the control box.
///
/// For N = 2 the spread of `Σ ε_j σ_j` is `2|ε| ≤ 2√3κ`, exactly. For larger N
/// the spread is bounded by `κ Σ_j (λ_max(B_j) − λ_min(B_j))`.
pub fn kappa_threshold(basis: &BasisSet, horizon: f64, segments: usize) -> Result<KappaThreshold> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!("horizon T must be positive, got {horizon}")));
    }
    if segments == 0 {
        return Err(Error::domain("segment count Z must be positive"));
    }
    let dt = horizon / segments as f64;
    if basis.dim() == 2 {
        return Ok(KappaThreshold {
            kappa: PI / (3f64.sqrt() * dt),
            exact: true,
        });
    }
    let spread_per_kappa: f64 = basis
        .elements()
        .iter()
        .map(|b| {
            let ev = sorted_eigenvalues(b);
            ev[ev.len() - 1] - ev[0]
        })
        .sum();
    Ok(KappaThreshold {
        kappa: 2.0 * PI / (dt * spread_per_kappa),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_defect, trace};
    use crate::qdyn::build_su_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    #[test]
    fn zero_grid_single_segment_is_scaled_identity() {
        for n in [2usize, 3] {
            let b = build_su_basis(n).unwrap();
            let t = 1.7;
            let g = ControlGrid::zeros(b.len(), 1, t, 1.0).unwrap();
            let tm = psi_tangent_map(&g, &b).unwrap();
            // −i·(−i T B_j) = −T B_j, whose orthonormal coordinates are −√2 T e_j
            let want = DMatrix::<f64>::identity(b.len(), b.len()) * (-SQRT_2 * t);
            assert!((&tm.rows - want).norm() < 1e-13);
            let r = local_surjectivity_rank(&tm, DEFAULT_RANK_TOL);
            assert_eq!(r.rank, b.len());
            assert!(r.surjective);
        }
    }

    #[test]
    fn single_control_has_rank_one() {
        let tm = TangentMap {
            rows: DMatrix::from_row_slice(1, 3, &[0.3, -0.1, 0.9]),
        };
        let r = local_surjectivity_rank(&tm, DEFAULT_RANK_TOL);
        assert_eq!(r.rank, 1);
        assert!(!r.surjective);
    }

    #[test]
    fn random_interior_grid_is_full_rank_and_rows_are_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let b = build_su_basis(2).unwrap();
        let g = ControlGrid::random_uniform(3, 4, 1.0, 3.0, &mut rng).unwrap();
        let tm = psi_tangent_map(&g, &b).unwrap();
        assert_eq!(tm.n_controls(), 12);
        assert_eq!(local_surjectivity_rank(&tm, DEFAULT_RANK_TOL).rank, 3);
        for k in 0..12 {
            let m = tm.row_as_matrix(k, &b);
            assert!(hermitian_defect(&m) < 1e-10 && trace(&m).norm() < 1e-10);
        }
    }

    #[test]
    fn kappa_threshold_values() {
        let b = build_su_basis(2).unwrap();
        let k4 = kappa_threshold(&b, 1.0, 4).unwrap();
        assert!(k4.exact);
        assert!((k4.kappa - 4.0 * PI / 3f64.sqrt()).abs() < 1e-12);
        assert!((k4.kappa - 7.255197456936871).abs() < 1e-6);
        let k8 = kappa_threshold(&b, 1.0, 8).unwrap();
        assert!((k8.kappa - 2.0 * k4.kappa).abs() < 1e-12);
        let t2 = kappa_threshold(&b, 2.0, 4).unwrap();
        assert!((t2.kappa - 0.5 * k4.kappa).abs() < 1e-12);
        assert!(kappa_threshold(&b, 0.0, 4).is_err());
        assert!(kappa_threshold(&b, 1.0, 0).is_err());
    }

    #[test]
    fn kappa_threshold_is_conservative_above_two_levels() {
        let b = build_su_basis(3).unwrap();
        let thr = kappa_threshold(&b, 1.0, 4).unwrap();
        assert!(!thr.exact);
        // Any admissible Hamiltonian at κ = κ_thr has spread within the bound.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let g = ControlGrid::random_uniform(8, 1, 1.0, thr.kappa, &mut rng).unwrap();
            let h = crate::qdyn::assemble_segment_hamiltonian(&g, 0, &b).unwrap();
            let ev = sorted_eigenvalues(&h);
            assert!(ev[2] - ev[0] <= 2.0 * PI / 0.25 + 1e-9);
        }
    }
}
