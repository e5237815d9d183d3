//! Quantum control landscapes of closed N-level systems under bounded
//! piecewise-constant controls.
//!
//! - [`qdyn`]: su(N) bases, segment Hamiltonians, propagators and their Fréchet derivatives.
//! - [`landscape`]: the objective, its exact gradient and attainable range, and
//!   local-surjectivity tests (tangent-map rank, one-sided cone test at the box boundary).
//! - [`traps`]: projected gradient ascent, critical-point classification under box
//!   constraints, multistart basin statistics and 1D critical-value censuses.
//! - [`counterexamples`]: the boundary-trap instance and the sliced analytic 2D landscape.

pub mod counterexamples;
pub mod error;
pub mod landscape;
pub mod linalg;
pub mod qdyn;
pub mod traps;

#[cfg(feature = "cli")]
pub mod cli;

mod par;

pub use error::{Error, Result};
