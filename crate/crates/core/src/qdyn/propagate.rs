use crate::error::{Error, Result};
use crate::linalg::{c64, identity, CMat};
use crate::qdyn::{BasisSet, ControlGrid, SegmentExp};

/// Segment propagators and their time-ordered product `U_T = U_Z···U_1`.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub segment_unitaries: Vec<CMat>,
    pub total: CMat,
}

fn check_shapes(grid: &ControlGrid, basis: &BasisSet) -> Result<()> {
    if grid.rows() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: grid.rows(),
        });
    }
    Ok(())
}

/// `H_z = Σ_j ε_{j,z} B_j` for zero-based segment `z`.
pub fn assemble_segment_hamiltonian(grid: &ControlGrid, z: usize, basis: &BasisSet) -> Result<CMat> {
    check_shapes(grid, basis)?;
    if z >= grid.segments() {
        return Err(Error::IndexOutOfRange {
            index: z,
            len: grid.segments(),
        });
    }
    let n = basis.dim();
    let mut h = CMat::zeros(n, n);
    for (j, b) in basis.elements().iter().enumerate() {
        let eps = grid.get(j, z);
        if eps != 0.0 {
            h += b * c64(eps, 0.0);
        }
    }
    Ok(h)
}

pub fn propagate(grid: &ControlGrid, basis: &BasisSet) -> Result<PropagationResult> {
    let chain = SegmentChain::new(grid, basis)?;
    Ok(PropagationResult {
        segment_unitaries: chain.segments.iter().map(|s| s.unitary().clone()).collect(),
        total: chain.total().clone(),
    })
}

/// Segment exponentials plus prefix and suffix products, from which
/// `∂U_T/∂ε_{j,z} = (U_Z···U_{z+1}) · L_z(B_j) · (U_{z−1}···U_1)` follows
/// with `L_z` the Fréchet derivative of the z-th segment exponential.
#[derive(Debug, Clone)]
pub struct SegmentChain<'a> {
    basis: &'a BasisSet,
    segments: Vec<SegmentExp>,
    /// `before[z] = U_{z−1}···U_0`, `before[0] = I`; `before[Z]` is the total.
    before: Vec<CMat>,
    /// `after[z] = U_{Z−1}···U_{z+1}`, `after[Z−1] = I`.
    after: Vec<CMat>,
}

impl<'a> SegmentChain<'a> {
    pub fn new(grid: &ControlGrid, basis: &'a BasisSet) -> Result<Self> {
        check_shapes(grid, basis)?;
        let dt = grid.segment_duration();
        let z_count = grid.segments();
        let n = basis.dim();

        let segments = (0..z_count)
            .map(|z| SegmentExp::new(&assemble_segment_hamiltonian(grid, z, basis)?, dt))
            .collect::<Result<Vec<_>>>()?;

        let mut before = Vec::with_capacity(z_count + 1);
        before.push(identity(n));
        for s in &segments {
            let next = s.unitary() * before.last().unwrap();
            before.push(next);
        }

        let mut after = vec![identity(n); z_count];
        for z in (0..z_count.saturating_sub(1)).rev() {
            after[z] = &after[z + 1] * segments[z + 1].unitary();
        }

        Ok(SegmentChain {
            basis,
            segments,
            before,
            after,
        })
    }

    pub fn total(&self) -> &CMat {
        self.before.last().unwrap()
    }

    pub fn segments(&self) -> &[SegmentExp] {
        &self.segments
    }

    pub fn basis(&self) -> &BasisSet {
        self.basis
    }

    /// `before[z] · m · after[z]`, so that `Tr[∂U_T/∂ε_{j,z} · m] = Tr[L_z(B_j) · sandwich(z, m)]`.
    pub fn sandwich(&self, z: usize, m: &CMat) -> CMat {
        &self.before[z] * m * &self.after[z]
    }

    /// `∂U_T/∂ε_{j,z}` (zero-based indices).
    pub fn derivative(&self, j: usize, z: usize) -> Result<CMat> {
        if z >= self.segments.len() {
            return Err(Error::IndexOutOfRange {
                index: z,
                len: self.segments.len(),
            });
        }
        let inner = self.segments[z].frechet(self.basis.get(j)?)?;
        Ok(&self.after[z] * inner * &self.before[z])
    }
}
