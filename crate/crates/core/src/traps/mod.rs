//! Critical points under box constraints, projected gradient ascent and
//! critical-value censuses.

mod ascent;
mod basins;
mod census;
mod classify;

pub use ascent::{gradient_ascent, projected_gradient, AscentParams, AscentStep, AscentTrace};
pub use basins::{basin_census, BasinCensus, BasinRecord, BasinSampler};
pub use census::{critical_value_census_1d, CensusResult1D, CriticalKind};
pub use classify::{classify_point, Classification, CriticalPointReport};

use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by classification, ascent and censuses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Projected-gradient norm below which a point is critical.
    pub grad: f64,
    /// Finite-difference Hessian step, relative to κ.
    pub hess_step_rel: f64,
    /// Hessian eigenvalues with magnitude at or below this are treated as zero.
    pub hess_zero: f64,
    /// Bisection bracket width for 1D roots.
    pub root: f64,
    /// Critical values closer than this are merged.
    pub merge: f64,
    /// A run succeeds when it ends within this fraction of `j_max − j_min` of `j_max`.
    pub success_margin_rel: f64,
    /// A control is active when `κ − |ε| <= active·κ`.
    pub active: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grad: 1e-8,
            hess_step_rel: 1e-4,
            hess_zero: 1e-6,
            root: 1e-10,
            merge: 1e-6,
            success_margin_rel: 1e-4,
            active: crate::landscape::DEFAULT_ACTIVE_TOL,
        }
    }
}
