//! The landscape `J(ε) = Tr[Ô U_T(ε) ρ0 U_T(ε)†]`, its gradient, its attainable
//! range, and local-surjectivity diagnostics for the map ε ↦ U_T(ε).

mod cone;
pub(crate) mod gradient;
mod nnls;
mod scan;
mod system;
pub(crate) mod tangent;

pub use cone::{
    active_set, boundary_cone_surjectivity, ActiveSide, ConeReport, DEFAULT_ACTIVE_TOL, DEFAULT_CONE_SAMPLES,
};
pub use gradient::{gradient, objective_of_grid, LandscapeGradient};
pub use nnls::nnls;
pub use scan::{scan_plane, ScanPoint};
pub use system::{objective, objective_range, phi_gradient, ObjectiveRange, QuantumSystem};
pub use tangent::{
    kappa_threshold, local_surjectivity_rank, psi_tangent_map, KappaThreshold, RankReport, TangentMap, DEFAULT_RANK_TOL,
};
