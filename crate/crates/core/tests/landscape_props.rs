use landscape_lab::landscape::{
    gradient, local_surjectivity_rank, objective, objective_of_grid, objective_range, phi_gradient, psi_tangent_map,
    QuantumSystem, DEFAULT_RANK_TOL,
};
use landscape_lab::qdyn::{build_su_basis, propagate, ControlGrid};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(n: usize, z: usize, seed: u64) -> (QuantumSystem, ControlGrid) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = QuantumSystem::random(n, &mut rng).unwrap();
    let grid = ControlGrid::random_uniform(n * n - 1, z, 1.0, 1.0, &mut rng).unwrap();
    (system, grid)
}

#[test]
fn objective_stays_in_range() {
    let bases: Vec<_> = (2..=3).map(|n| build_su_basis(n).unwrap()).collect();
    for seed in 0..10_000u64 {
        let n = 2 + (seed % 2) as usize;
        let (system, grid) = instance(n, 1 + (seed % 5) as usize, seed);
        let j = objective(&system, &propagate(&grid, &bases[n - 2]).unwrap().total).unwrap();
        assert!(objective_range(&system).contains(j, 1e-10), "seed {seed}: {j}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_is_tangent_map_paired_with_phi_gradient(n in 2usize..=3, z in 1usize..=6, seed in any::<u64>()) {
        let basis = build_su_basis(n).unwrap();
        let (system, grid) = instance(n, z, seed);
        let g = gradient(&system, &grid, &basis).unwrap().to_flat();
        let tm = psi_tangent_map(&grid, &basis).unwrap();
        let dphi = phi_gradient(&system, &propagate(&grid, &basis).unwrap().total, &basis);
        for (k, gk) in g.iter().enumerate() {
            let paired: f64 = tm.row(k).iter().zip(&dphi).map(|(a, b)| a * b).sum();
            prop_assert!((paired - gk).abs() < 1e-8, "k = {k}: {paired} vs {gk}");
        }
    }

    #[test]
    fn full_rank_interior_points_are_not_critical(n in 2usize..=3, z in 1usize..=6, seed in any::<u64>()) {
        let basis = build_su_basis(n).unwrap();
        let (system, grid) = instance(n, z, seed);
        let rank = local_surjectivity_rank(&psi_tangent_map(&grid, &basis).unwrap(), DEFAULT_RANK_TOL);
        let range = objective_range(&system);
        let j = objective_of_grid(&system, &grid, &basis).unwrap();
        prop_assume!(rank.surjective && j > range.j_min + 1e-6 && j < range.j_max - 1e-6);
        prop_assert!(gradient(&system, &grid, &basis).unwrap().norm() > 1e-10);
    }
}
