use landscape_lab::linalg::{unitarity_defect, CMat};
use landscape_lab::qdyn::{build_su_basis, propagate, ControlGrid, SegmentChain};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_grid(n: usize, z: usize, horizon: f64, kappa: f64, seed: u64) -> ControlGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ControlGrid::random_uniform(n * n - 1, z, horizon, kappa, &mut rng).unwrap()
}

#[test]
fn unitarity_over_a_thousand_grids() {
    let bases: Vec<_> = (2..=4).map(|n| build_su_basis(n).unwrap()).collect();
    for seed in 0..1000u64 {
        let n = 2 + (seed % 3) as usize;
        let z = 1 + (seed % 7) as usize;
        let grid = random_grid(n, z, 1.0 + (seed % 5) as f64 * 0.5, 2.0, seed);
        let prop = propagate(&grid, &bases[n - 2]).unwrap();
        for u in &prop.segment_unitaries {
            assert!(unitarity_defect(u) < 1e-12, "seed {seed}");
        }
        assert!(unitarity_defect(&prop.total) < 1e-12, "seed {seed}");
    }
}

fn det_minus_one(u: &CMat) -> f64 {
    (u.determinant() - num_complex::Complex64::new(1.0, 0.0)).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halves_compose(n in 2usize..=4, half in 1usize..=4, horizon in 0.1f64..3.0, seed in any::<u64>()) {
        let basis = build_su_basis(n).unwrap();
        let grid = random_grid(n, 2 * half, horizon, 1.5, seed);
        let v = grid.values();
        let first = ControlGrid::new(horizon / 2.0, 1.5, v.columns(0, half).into_owned()).unwrap();
        let second = ControlGrid::new(horizon / 2.0, 1.5, v.columns(half, half).into_owned()).unwrap();
        let whole = propagate(&grid, &basis).unwrap().total;
        let composed = propagate(&second, &basis).unwrap().total * propagate(&first, &basis).unwrap().total;
        prop_assert!((whole - composed).norm() < 1e-12);
    }

    #[test]
    fn determinant_is_one(n in 2usize..=5, z in 1usize..=6, seed in any::<u64>()) {
        let basis = build_su_basis(n).unwrap();
        let u = propagate(&random_grid(n, z, 1.0, 3.0, seed), &basis).unwrap().total;
        prop_assert!(det_minus_one(&u) < 1e-10);
    }

    #[test]
    fn frechet_chain_matches_finite_difference(
        n in 2usize..=3,
        z in 1usize..=5,
        seed in any::<u64>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let basis = build_su_basis(n).unwrap();
        let inner = random_grid(n, z, 1.0, 0.5, seed);
        let grid = ControlGrid::new(1.0, 1.0, inner.values().clone()).unwrap();
        let (j, zz) = grid.unflat_index(pick.index(grid.len()));
        let analytic = SegmentChain::new(&grid, &basis).unwrap().derivative(j, zz).unwrap();

        let h = 1e-5;
        let shifted = |delta: f64| {
            let mut v: DMatrix<f64> = grid.values().clone();
            v[(j, zz)] += delta;
            propagate(&grid.with_values(v).unwrap(), &basis).unwrap().total
        };
        let fd = (shifted(h) - shifted(-h)) / num_complex::Complex64::new(2.0 * h, 0.0);
        let rel = (&fd - &analytic).norm() / analytic.norm().max(1e-300);
        prop_assert!(rel < 1e-6, "relative error {rel}");
    }
}
