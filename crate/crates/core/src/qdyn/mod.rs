//! Closed-system dynamics under piecewise-constant control.
//!
//! Controls ε_{j,z} multiply the su(N) generators B_j on the z-th of Z equal
//! time segments, so each segment evolves under a constant Hamiltonian
//! H_z = Σ_j ε_{j,z} B_j and the total propagator is the ordered product
//! U_T = U_Z···U_1 with U_z = exp(−i H_z T/Z) (ħ = 1).

mod basis;
mod expm;
mod grid;
mod propagate;

pub use basis::{build_su_basis, BasisSet};
pub use expm::{expm_frechet, expm_step, SegmentExp};
pub use grid::ControlGrid;
pub use propagate::{assemble_segment_hamiltonian, propagate, PropagationResult, SegmentChain};
