//! Small dense complex linear algebra shared by the propagation and landscape code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Frobenius norm of `U†U - I`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).norm()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_of_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for k in 0..n {
            acc += a[(r, k)] * b[(k, r)];
        }
    }
    acc
}

pub fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_hermitian(m: &CMat, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let scale = m.norm().max(1.0);
    let defect = hermitian_defect(m);
    if defect > tol * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(h: &CMat) -> Self {
        let n = h.nrows();
        if n == 0 {
            return HermitianEigen {
                values: DVector::zeros(0),
                vectors: CMat::zeros(0, 0),
            };
        }
        // Symmetrize so round-off in the input never leaks into the spectrum.
        let sym = (h + h.adjoint()) * c64(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        HermitianEigen {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let mut scaled = self.vectors.clone();
        for (col, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..scaled.nrows() {
                scaled[(r, col)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Sorted (increasing) eigenvalues of a Hermitian matrix.
pub fn sorted_eigenvalues(h: &CMat) -> Vec<f64> {
    let mut vals: Vec<f64> = HermitianEigen::new(h).values.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs_hermitian_input() {
        let h = CMat::from_row_slice(
            3,
            3,
            &[
                c64(1.0, 0.0),
                c64(0.5, -0.25),
                c64(0.0, 2.0),
                c64(0.5, 0.25),
                c64(-2.0, 0.0),
                c64(0.1, 0.0),
                c64(0.0, -2.0),
                c64(0.1, 0.0),
                c64(0.3, 0.0),
            ],
        );
        let eig = HermitianEigen::new(&h);
        let back = eig.map(|l| c64(l, 0.0));
        assert!((back - &h).norm() < 1e-13);
        assert!(unitarity_defect(&eig.vectors) < 1e-13);
    }

    #[test]
    fn trace_of_product_matches_dense_product() {
        let a = CMat::from_fn(3, 3, |r, c| c64(r as f64 + 1.0, c as f64 - 0.5));
        let b = CMat::from_fn(3, 3, |r, c| c64((r * c) as f64, 1.0));
        assert!((trace_of_product(&a, &b) - trace(&(&a * &b))).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = identity(2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(ensure_hermitian(&m, 1e-12), Err(Error::NotHermitian(_))));
    }
}
