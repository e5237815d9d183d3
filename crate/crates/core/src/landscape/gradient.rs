use nalgebra::DMatrix;

use crate::error::Result;
use crate::landscape::{objective, QuantumSystem};
use crate::linalg::trace_of_product;
use crate::qdyn::{BasisSet, ControlGrid, SegmentChain};

/// `∂J/∂ε_{j,z}` laid out like the control grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGradient {
    pub values: DMatrix<f64>,
}

impl LandscapeGradient {
    pub fn norm(&self) -> f64 {
        self.values.norm()
    }

    pub fn get(&self, j: usize, z: usize) -> f64 {
        self.values[(j, z)]
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len());
        for row in self.values.row_iter() {
            out.extend(row.iter().copied());
        }
        out
    }
}

pub fn objective_of_grid(system: &QuantumSystem, grid: &ControlGrid, basis: &BasisSet) -> Result<f64> {
    let chain = SegmentChain::new(grid, basis)?;
    objective(system, chain.total())
}

/// Exact gradient of the landscape.
///
/// With `M = ρ0 U_T† Ô`, `∂J = 2 Re Tr[∂U_T · M]`, and the cyclic trace lets
/// the prefix/suffix products fold into `M` once per segment.
pub fn gradient(system: &QuantumSystem, grid: &ControlGrid, basis: &BasisSet) -> Result<LandscapeGradient> {
    let chain = SegmentChain::new(grid, basis)?;
    gradient_from_chain(system, &chain)
}

pub(crate) fn gradient_from_chain(system: &QuantumSystem, chain: &SegmentChain<'_>) -> Result<LandscapeGradient> {
    let basis = chain.basis();
    let total = chain.total();
    let m = system.rho0() * total.adjoint() * system.observable();
    let z_count = chain.segments().len();
    let mut values = DMatrix::zeros(basis.len(), z_count);
    for z in 0..z_count {
        let w = chain.sandwich(z, &m);
        for (j, b) in basis.elements().iter().enumerate() {
            let frechet = chain.segments()[z].frechet(b)?;
            values[(j, z)] = 2.0 * trace_of_product(&frechet, &w).re;
        }
    }
    Ok(LandscapeGradient { values })
}
