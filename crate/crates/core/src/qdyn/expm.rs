use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, ensure_hermitian, ensure_square, CMat, HermitianEigen};

/// Inputs whose Hermitian defect exceeds this (relative to max(1, ‖H‖_F)) are rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `exp(−i H dt)` for one segment, keeping the eigendecomposition of `H`
/// so Fréchet derivatives along any direction are cheap.
#[derive(Debug, Clone)]
pub struct SegmentExp {
    eigen: HermitianEigen,
    dt: f64,
    unitary: CMat,
    degeneracy_tol: f64,
}

impl SegmentExp {
    pub fn new(h: &CMat, dt: f64) -> Result<Self> {
        ensure_hermitian(h, HERMITIAN_TOL)?;
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(Error::domain(format!("time step must be >= 0, got {dt}")));
        }
        let eigen = HermitianEigen::new(h);
        let unitary = eigen.map(|l| Complex64::from_polar(1.0, -l * dt));
        let degeneracy_tol = 1e-10 * eigen.spectral_radius().max(1.0);
        Ok(SegmentExp {
            eigen,
            dt,
            unitary,
            degeneracy_tol,
        })
    }

    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigen.values.as_slice()
    }

    /// Directional derivative `∂/∂s exp(−i(H + sD)dt)` at `s = 0`.
    ///
    /// In the eigenbasis of `H` the direction is scaled entrywise by the
    /// divided difference of `f(λ) = e^{−iλ dt}`. The difference is written as
    /// `e^{−i λ̄ dt} · (−2i) sin(Δ dt / 2) / Δ` with λ̄ the midpoint, which has
    /// no cancellation for close eigenvalues; below the degeneracy threshold
    /// the derivative `f'(λ_a) = −i dt e^{−iλ_a dt}` is used.
    pub fn frechet(&self, direction: &CMat) -> Result<CMat> {
        let n = self.unitary.nrows();
        if ensure_square(direction)? != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: direction.nrows(),
            });
        }
        let v = &self.eigen.vectors;
        let mut d = v.adjoint() * direction * v;
        let lam = &self.eigen.values;
        let dt = self.dt;
        for a in 0..n {
            for b in 0..n {
                let delta = lam[a] - lam[b];
                let kernel = if delta.abs() > self.degeneracy_tol {
                    let mid = 0.5 * (lam[a] + lam[b]);
                    Complex64::from_polar(1.0, -mid * dt) * c64(0.0, -2.0 * (0.5 * delta * dt).sin() / delta)
                } else {
                    Complex64::from_polar(1.0, -lam[a] * dt) * c64(0.0, -dt)
                };
                d[(a, b)] *= kernel;
            }
        }
        Ok(v * d * v.adjoint())
    }
}

/// `exp(−i H dt)` via Hermitian eigendecomposition.
pub fn expm_step(h: &CMat, dt: f64) -> Result<CMat> {
    Ok(SegmentExp::new(h, dt)?.unitary)
}

/// Fréchet derivative of `H ↦ exp(−i H dt)` at `h` along `direction`.
pub fn expm_frechet(h: &CMat, dt: f64, direction: &CMat) -> Result<CMat> {
    SegmentExp::new(h, dt)?.frechet(direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, unitarity_defect, I};
    use crate::qdyn::build_su_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let a = CMat::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + a.adjoint()) * c64(0.5, 0.0)
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = expm_step(&CMat::zeros(3, 3), 2.5).unwrap();
        assert!((u - identity(3)).norm() < 1e-15);
    }

    #[test]
    fn sigma_sum_at_half_period_is_minus_identity() {
        // exp(−iθ n·σ) = cos θ I − i sin θ n·σ with θ = √3 κ dt = π.
        let b = build_su_basis(2).unwrap();
        let kappa = 0.8;
        let h = (&b.elements()[0] + &b.elements()[1] + &b.elements()[2]) * c64(kappa, 0.0);
        let dt = PI / (3f64.sqrt() * kappa);
        let u = expm_step(&h, dt).unwrap();
        assert!((u + identity(2)).norm() < 1e-14);

        // and an off-period angle against the closed form
        let dt = 0.37;
        let theta = 3f64.sqrt() * kappa * dt;
        let nsig = &h * c64(1.0 / (3f64.sqrt() * kappa), 0.0);
        let want = identity(2) * c64(theta.cos(), 0.0) - nsig * (I * theta.sin());
        assert!((expm_step(&h, dt).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn sigma3_quarter_period_is_diagonal_phase() {
        let b = build_su_basis(2).unwrap();
        let u = expm_step(&b.elements()[2], PI / 2.0).unwrap();
        assert!((u[(0, 0)] - c64(0.0, -1.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c64(0.0, 1.0)).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15 && u[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_and_negative_dt() {
        let mut h = CMat::zeros(2, 2);
        h[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(expm_step(&h, 1.0), Err(Error::NotHermitian(_))));
        assert!(expm_step(&CMat::zeros(2, 2), -1.0).is_err());
    }

    #[test]
    fn frechet_commuting_direction() {
        let b = build_su_basis(2).unwrap();
        let h = &b.elements()[2] * c64(0.9, 0.0);
        let d = &b.elements()[2] * c64(-0.4, 0.0);
        let dt = 0.7;
        let got = expm_frechet(&h, dt, &d).unwrap();
        let want = &d * c64(0.0, -dt) * expm_step(&h, dt).unwrap();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn frechet_degenerate_branch_at_zero() {
        let b = build_su_basis(3).unwrap();
        let d = &b.elements()[4];
        let got = expm_frechet(&CMat::zeros(3, 3), 1.3, d).unwrap();
        assert!((got - d * c64(0.0, -1.3)).norm() < 1e-15);
    }

    #[test]
    fn frechet_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 4] {
            for _ in 0..20 {
                let h = random_hermitian(n, &mut rng);
                let d = random_hermitian(n, &mut rng);
                let dt = rng.random_range(0.1..2.0);
                let step = 1e-5;
                let plus = expm_step(&(&h + &d * c64(step, 0.0)), dt).unwrap();
                let minus = expm_step(&(&h - &d * c64(step, 0.0)), dt).unwrap();
                let fd = (plus - minus) * c64(0.5 / step, 0.0);
                let got = expm_frechet(&h, dt, &d).unwrap();
                let rel = (&got - &fd).norm() / fd.norm();
                assert!(rel < 1e-6, "n={n} rel={rel:e}");
            }
        }
    }

    #[test]
    fn frechet_continuous_across_degeneracy_threshold() {
        // eigenvalue gap just above and below the threshold give the same answer
        let d = CMat::from_fn(2, 2, |r, c| if r == c { c64(0.0, 0.0) } else { c64(1.0, 0.0) });
        let dt = 1.0;
        for gap in [1e-11, 1e-9, 1e-7] {
            let h = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c64(gap / 2.0, 0.0),
                c64(-gap / 2.0, 0.0),
            ]));
            let got = expm_frechet(&h, dt, &d).unwrap();
            let want = &d * c64(0.0, -dt);
            assert!((got - want).norm() < 1e-9, "gap={gap:e}");
        }
    }

    #[test]
    fn random_exponentials_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..6 {
            let h = random_hermitian(n, &mut rng) * c64(5.0, 0.0);
            assert!(unitarity_defect(&expm_step(&h, 1.7).unwrap()) < 1e-12);
        }
    }
}
