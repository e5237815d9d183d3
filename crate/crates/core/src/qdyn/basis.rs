use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c64, trace_of_product, CMat};

/// Orthogonal Hermitian traceless generators of su(N), normalized to
/// `Tr[B_i B_j] = 2 δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    dim: usize,
    elements: Vec<CMat>,
}

/// Generalized Gell-Mann basis: all symmetric off-diagonal pairs, then all
/// antisymmetric pairs, then the diagonal ladder. For N = 2 this is σ1, σ2, σ3.
pub fn build_su_basis(n: usize) -> Result<BasisSet> {
    if n < 2 {
        return Err(Error::domain(format!("su(N) basis needs N >= 2, got {n}")));
    }
    let mut elements = Vec::with_capacity(n * n - 1);

    for r in 0..n {
        for c in (r + 1)..n {
            let mut m = CMat::zeros(n, n);
            m[(r, c)] = c64(1.0, 0.0);
            m[(c, r)] = c64(1.0, 0.0);
            elements.push(m);
        }
    }
    for r in 0..n {
        for c in (r + 1)..n {
            let mut m = CMat::zeros(n, n);
            m[(r, c)] = c64(0.0, -1.0);
            m[(c, r)] = c64(0.0, 1.0);
            elements.push(m);
        }
    }
    for l in 1..n {
        let lf = l as f64;
        let norm = (2.0 / (lf * (lf + 1.0))).sqrt();
        let mut m = CMat::zeros(n, n);
        for k in 0..l {
            m[(k, k)] = c64(norm, 0.0);
        }
        m[(l, l)] = c64(-lf * norm, 0.0);
        elements.push(m);
    }

    Ok(BasisSet { dim: n, elements })
}

impl BasisSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, N² − 1.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn get(&self, j: usize) -> Result<&CMat> {
        self.elements.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.elements.len(),
        })
    }

    /// Coordinates of a Hermitian traceless matrix in the orthonormal basis
    /// `B_j / √2` (Frobenius inner product).
    pub fn coordinates(&self, x: &CMat) -> Vec<f64> {
        self.elements
            .iter()
            .map(|b| trace_of_product(b, x).re / SQRT_2)
            .collect()
    }

    /// Inverse of [`BasisSet::coordinates`].
    pub fn from_coordinates(&self, coords: &[f64]) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (b, &x) in self.elements.iter().zip(coords) {
            m += b * c64(x / SQRT_2, 0.0);
        }
        m
    }
}
