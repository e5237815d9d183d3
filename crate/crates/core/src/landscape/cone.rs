use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::landscape::{nnls, TangentMap};
use crate::qdyn::ControlGrid;

pub const DEFAULT_ACTIVE_TOL: f64 = 1e-9;
pub const DEFAULT_CONE_SAMPLES: usize = 64;
/// A direction counts as unreachable when the best admissible combination misses it by more than this.
const REACH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActiveSide {
    /// At `+κ`: only `δε ≤ 0` is admissible.
    Upper,
    /// At `−κ`: only `δε ≥ 0` is admissible.
    Lower,
    /// `κ = 0`: no admissible variation at all.
    Pinned,
}

/// Controls within `active_tol·κ` of a bound, as `(j, z, side)`.
pub fn active_set(grid: &ControlGrid, active_tol: f64) -> Vec<(usize, usize, ActiveSide)> {
    let kappa = grid.bound();
    let mut out = Vec::new();
    for j in 0..grid.rows() {
        for z in 0..grid.segments() {
            let e = grid.get(j, z);
            if kappa == 0.0 {
                out.push((j, z, ActiveSide::Pinned));
            } else if kappa - e.abs() <= active_tol * kappa {
                out.push((j, z, if e > 0.0 { ActiveSide::Upper } else { ActiveSide::Lower }));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeReport {
    pub surjective: bool,
    /// First unreachable unit direction in orthonormal su(N) coordinates.
    pub witness: Option<Vec<f64>>,
    pub witness_residual: Option<f64>,
    pub directions_tested: usize,
    pub unreachable_count: usize,
    pub active_count: usize,
}

/// Whether admissible one-sided control variations map onto a neighbourhood
/// of U_T, i.e. whether their images positively span su(N).
///
/// Free rows enter with arbitrary sign and are projected out; rows at a bound
/// enter with the admissible sign through a non-negative least-squares fit.
/// Probes are the coordinate axes and their pairwise diagonals first, then
/// `samples` seeded random unit directions.
pub fn boundary_cone_surjectivity(
    grid: &ControlGrid,
    tm: &TangentMap,
    active_tol: f64,
    samples: usize,
    seed: u64,
) -> ConeReport {
    let d = tm.algebra_dim();
    let active = active_set(grid, active_tol);
    let mut side_of = vec![None; tm.n_controls()];
    for &(j, z, side) in &active {
        side_of[grid.flat_index(j, z)] = Some(side);
    }

    let free: Vec<usize> = (0..tm.n_controls()).filter(|&k| side_of[k].is_none()).collect();
    let projector = complement_projector(tm, &free, d);

    let constrained: Vec<DVector<f64>> = side_of
        .iter()
        .enumerate()
        .filter_map(|(k, side)| {
            let sign = match side {
                Some(ActiveSide::Upper) => -1.0,
                Some(ActiveSide::Lower) => 1.0,
                _ => return None,
            };
            Some(&projector * DVector::from_iterator(d, tm.rows.row(k).iter().map(|v| v * sign)))
        })
        .collect();
    let cone = if constrained.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(&constrained)
    };

    let mut report = ConeReport {
        surjective: true,
        witness: None,
        witness_residual: None,
        directions_tested: 0,
        unreachable_count: 0,
        active_count: active.len(),
    };
    let mut check = |w: Vec<f64>| {
        let target = &projector * DVector::from_vec(w.clone());
        let (_, residual) = nnls(&cone, &target);
        report.directions_tested += 1;
        if residual > REACH_TOL {
            report.unreachable_count += 1;
            if report.witness.is_none() {
                report.surjective = false;
                report.witness = Some(w);
                report.witness_residual = Some(residual);
            }
        }
    };

    for w in structured_probes(d) {
        check(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        w.iter_mut().for_each(|v| *v /= norm);
        check(w);
    }
    report
}

/// `I − Q Qᵀ` with `Q` an orthonormal basis of the span of the free rows.
fn complement_projector(tm: &TangentMap, free: &[usize], d: usize) -> DMatrix<f64> {
    let mut p = DMatrix::<f64>::identity(d, d);
    if free.is_empty() {
        return p;
    }
    let cols = tm.rows.select_rows(free).transpose();
    let svd = cols.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let top = svd.singular_values.max();
    if top == 0.0 {
        return p;
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-10 * top {
            let q = u.column(k);
            p -= q * q.transpose();
        }
    }
    p
}

fn structured_probes(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for k in 0..d {
        for sign in [1.0, -1.0] {
            let mut w = vec![0.0; d];
            w[k] = sign;
            out.push(w);
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..d {
        for l in (k + 1)..d {
            for (sk, sl) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut w = vec![0.0; d];
                w[k] = sk * h;
                w[l] = sl * h;
                out.push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::psi_tangent_map;
    use crate::qdyn::build_su_basis;
    use rand::SeedableRng;

    #[test]
    fn interior_full_rank_is_surjective() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let b = build_su_basis(2).unwrap();
        let g = ControlGrid::random_uniform(3, 4, 1.0, 2.0, &mut rng).unwrap();
        let tm = psi_tangent_map(&g, &b).unwrap();
        let r = boundary_cone_surjectivity(&g, &tm, DEFAULT_ACTIVE_TOL, DEFAULT_CONE_SAMPLES, 0);
        assert_eq!(r.active_count, 0);
        assert!(r.surjective);
        assert!(r.witness.is_none());
        assert_eq!(r.directions_tested, 6 + 12 + DEFAULT_CONE_SAMPLES);
    }

    #[test]
    fn one_active_control_with_spanning_free_rows() {
        let b = build_su_basis(2).unwrap();
        let mut values = DMatrix::from_element(3, 2, 0.1);
        values[(1, 0)] = 1.0;
        let g = ControlGrid::new(1.0, 1.0, values).unwrap();
        let tm = psi_tangent_map(&g, &b).unwrap();
        let r = boundary_cone_surjectivity(&g, &tm, DEFAULT_ACTIVE_TOL, 16, 5);
        assert_eq!(r.active_count, 1);
        assert!(r.surjective);
    }

    #[test]
    fn single_one_sided_generator_is_not_surjective() {
        // one control at its upper bound in a 1-control, 3-dim problem
        let b = build_su_basis(2).unwrap();
        let g = ControlGrid::new(1.0, 1.0, DMatrix::from_element(3, 1, 1.0)).unwrap();
        let tm = psi_tangent_map(&g, &b).unwrap();
        let r = boundary_cone_surjectivity(&g, &tm, DEFAULT_ACTIVE_TOL, 8, 1);
        assert!(!r.surjective);
        assert_eq!(r.active_count, 3);
        let w = r.witness.unwrap();
        assert!((w.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn active_set_sides() {
        let mut values = DMatrix::zeros(3, 2);
        values[(0, 0)] = 2.0;
        values[(2, 1)] = -2.0;
        values[(1, 1)] = 1.999;
        let g = ControlGrid::new(1.0, 2.0, values).unwrap();
        let a = active_set(&g, DEFAULT_ACTIVE_TOL);
        assert_eq!(a, vec![(0, 0, ActiveSide::Upper), (2, 1, ActiveSide::Lower)]);
        let pinned = ControlGrid::zeros(3, 1, 1.0, 0.0).unwrap();
        assert!(active_set(&pinned, DEFAULT_ACTIVE_TOL)
            .iter()
            .all(|a| a.2 == ActiveSide::Pinned));
    }
}
