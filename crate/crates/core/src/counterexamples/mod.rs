//! Two explicit refutations of "fixing a control almost never creates traps".
//!
//! - [`boundary`]: a two-level system whose all-upper-bound control corner is a
//!   suboptimal local maximum, where the one-sided variations fail to cover a
//!   neighbourhood of U_T.
//! - [`analytic2d`]: a trap-free landscape of two controls in which freezing the
//!   second control at *any* value leaves a one-dimensional landscape with a
//!   local maximum.

pub mod analytic2d;
pub mod boundary;

pub use analytic2d::{
    analytic2d_eval, analytic2d_gradient, analytic2d_trap_free_scan, min_gradient_norm_scan, slice_census_2d,
    slice_critical_points, Analytic2DPoint, GradientScan, SliceCensus, SliceExtrema, DEFAULT_MARGIN,
};
pub use boundary::{
    boundary_trap_instance, full_turn_kappa, trap_observable, verify_boundary_trap, BoundaryTrapInstance, TrapOrder,
    TrapVerification,
};
