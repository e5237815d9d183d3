use std::f64::consts::SQRT_2;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, ensure_hermitian, ensure_square, sorted_eigenvalues, trace, trace_of_product, unitarity_defect, CMat, I,
};
use crate::qdyn::BasisSet;

const STATE_TOL: f64 = 1e-12;

/// Initial density matrix and observable of a closed N-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSystem {
    rho0: CMat,
    observable: CMat,
}

impl QuantumSystem {
    pub fn new(rho0: CMat, observable: CMat) -> Result<Self> {
        let n = ensure_square(&rho0)?;
        if ensure_square(&observable)? != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: observable.nrows(),
            });
        }
        ensure_hermitian(&rho0, STATE_TOL)?;
        ensure_hermitian(&observable, STATE_TOL)?;
        let tr = trace(&rho0);
        if (tr - c64(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::domain(format!("density matrix trace is {tr}, expected 1")));
        }
        if let Some(&lowest) = sorted_eigenvalues(&rho0).first() {
            if lowest < -STATE_TOL {
                return Err(Error::domain(format!(
                    "density matrix has negative eigenvalue {lowest}"
                )));
            }
        }
        Ok(QuantumSystem { rho0, observable })
    }

    /// Random full-rank mixed state and random Hermitian observable, both
    /// with (almost surely) nondegenerate spectra.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut draw = || c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let a = CMat::from_fn(n, n, |_, _| draw());
        let rho = &a * a.adjoint();
        let rho = &rho / trace(&rho);
        let rho = (&rho + rho.adjoint()) * c64(0.5, 0.0);
        let b = CMat::from_fn(n, n, |_, _| draw());
        let obs = (&b + b.adjoint()) * c64(0.5, 0.0);
        QuantumSystem::new(rho, obs)
    }

    pub fn dim(&self) -> usize {
        self.rho0.nrows()
    }

    pub fn rho0(&self) -> &CMat {
        &self.rho0
    }

    pub fn observable(&self) -> &CMat {
        &self.observable
    }

    pub fn with_observable(&self, observable: CMat) -> Result<Self> {
        QuantumSystem::new(self.rho0.clone(), observable)
    }
}

/// Interval of attainable objective values over all unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveRange {
    pub j_min: f64,
    pub j_max: f64,
}

impl ObjectiveRange {
    pub fn width(&self) -> f64 {
        self.j_max - self.j_min
    }

    pub fn contains(&self, j: f64, tol: f64) -> bool {
        j >= self.j_min - tol && j <= self.j_max + tol
    }
}

/// `Re Tr[Ô U ρ0 U†]`.
pub fn objective(system: &QuantumSystem, u: &CMat) -> Result<f64> {
    if u.nrows() != system.dim() || u.ncols() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: u.nrows(),
        });
    }
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    let evolved = u * &system.rho0 * u.adjoint();
    let value = trace_of_product(&system.observable, &evolved);
    if value.im.abs() >= 1e-10 {
        return Err(Error::Numerical(format!("objective has imaginary part {:e}", value.im)));
    }
    Ok(value.re)
}

/// Von Neumann bounds: with the spectra `o` of Ô and `r` of ρ0 sorted
/// increasing, `j_max = Σ r_i o_i` and `j_min = Σ r_{N+1−i} o_i`.
pub fn objective_range(system: &QuantumSystem) -> ObjectiveRange {
    let o = sorted_eigenvalues(&system.observable);
    let r = sorted_eigenvalues(&system.rho0);
    let j_max = o.iter().zip(&r).map(|(a, b)| a * b).sum();
    let j_min = o.iter().zip(r.iter().rev()).map(|(a, b)| a * b).sum();
    ObjectiveRange { j_min, j_max }
}

/// Gradient of `φ(U) = Tr[Ô U ρ0 U†]` with respect to right-multiplication
/// `U ↦ U exp(i s B̂_k)`, where `B̂_k = B_k/√2` is the orthonormal basis.
pub fn phi_gradient(system: &QuantumSystem, u: &CMat, basis: &BasisSet) -> Vec<f64> {
    // Tr[O U iB ρ U†] = Tr[iB · ρ U† O U]
    let m = &system.rho0 * u.adjoint() * &system.observable * u;
    basis
        .elements()
        .iter()
        .map(|b| 2.0 * trace_of_product(&(b * I), &m).re / SQRT_2)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::qdyn::{build_su_basis, expm_step};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure_up() -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]))
    }

    #[test]
    fn validation() {
        let b = build_su_basis(2).unwrap();
        assert!(QuantumSystem::new(identity(2), b.elements()[2].clone()).is_err()); // trace 2
        assert!(QuantumSystem::new(pure_up(), b.elements()[2].clone()).is_ok());
        let neg = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.5, 0.0), c64(-0.5, 0.0)]));
        assert!(QuantumSystem::new(neg, identity(2)).is_err());
        assert!(matches!(
            QuantumSystem::new(pure_up(), identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            QuantumSystem::new(pure_up(), b.elements()[0].clone() * I),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn objective_identity_and_trace_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sys = QuantumSystem::random(3, &mut rng).unwrap();
        let direct = trace_of_product(sys.observable(), sys.rho0()).re;
        assert!((objective(&sys, &identity(3)).unwrap() - direct).abs() < 1e-14);

        let sys_i = sys.with_observable(identity(3)).unwrap();
        let b = build_su_basis(3).unwrap();
        let u = expm_step(&(&b.elements()[3] * c64(0.7, 0.0) + &b.elements()[7]), 1.1).unwrap();
        assert!((objective(&sys_i, &u).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn objective_rejects_non_unitary() {
        let b = build_su_basis(2).unwrap();
        let sys = QuantumSystem::new(pure_up(), b.elements()[2].clone()).unwrap();
        assert!(matches!(
            objective(&sys, &(identity(2) * c64(1.01, 0.0))),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn ranges() {
        let b = build_su_basis(2).unwrap();
        let sys = QuantumSystem::new(pure_up(), b.elements()[2].clone()).unwrap();
        let r = objective_range(&sys);
        assert!((r.j_min + 1.0).abs() < 1e-14 && (r.j_max - 1.0).abs() < 1e-14);

        let r = objective_range(&sys.with_observable(identity(2)).unwrap());
        assert!((r.j_min - 1.0).abs() < 1e-14 && (r.j_max - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = build_su_basis(3).unwrap();
        let sys = QuantumSystem::random(3, &mut rng).unwrap();
        let u = expm_step(
            &(&b.elements()[1] * c64(0.4, 0.0) + &b.elements()[6] * c64(-1.2, 0.0)),
            1.0,
        )
        .unwrap();
        let g = phi_gradient(&sys, &u, &b);
        let h = 1e-6;
        for (k, bk) in b.elements().iter().enumerate() {
            // exp(i s B̂) = exp(−i H s) with H = −B̂
            let gen = bk * c64(-1.0 / SQRT_2, 0.0);
            let plus = objective(&sys, &(&u * expm_step(&gen, h).unwrap())).unwrap();
            let minus = objective(&sys, &(&u * expm_step(&(-&gen), h).unwrap())).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-8, "k={k}");
        }
    }
}
