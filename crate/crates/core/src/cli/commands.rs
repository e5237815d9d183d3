use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::args::{CensusFn, Command, ControlsKind, Dynamics, RunConfig, SystemKind};
use super::output::{with_hex, Cell, Table};
use crate::counterexamples::{
    analytic2d_trap_free_scan, boundary_trap_instance, slice_census_2d, verify_boundary_trap,
};
use crate::error::Error;
use crate::landscape::{
    boundary_cone_surjectivity, kappa_threshold, local_surjectivity_rank, objective_range, psi_tangent_map, scan_plane,
    QuantumSystem,
};
use crate::linalg::{unitarity_defect, CMat};
use crate::qdyn::{build_su_basis, propagate, BasisSet, ControlGrid};
use crate::traps::{basin_census, critical_value_census_1d, gradient_ascent, AscentParams, BasinSampler, CriticalKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EXPECTATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Library(Error::Numerical(_) | Error::NotUnitary(_)) => EXIT_NUMERICAL,
            CliError::Library(_) => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    pub results: Value,
    pub derived: Value,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub table: Table,
    /// Set when an `--expect-*` check did not hold.
    #[serde(skip)]
    pub expectation_failed: bool,
}

impl RunReport {
    /// Full JSON document; `results` and `derived` carry hex-float mirrors.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["results"] = with_hex(v["results"].take());
        v["derived"] = with_hex(v["derived"].take());
        v
    }

    /// The JSON document without the wall-time field.
    pub fn payload(&self) -> Value {
        let mut v = self.to_json();
        v.as_object_mut().expect("object").remove("wall_time_s");
        v
    }
}

struct Outcome {
    results: Value,
    derived: Value,
    table: Table,
    expectation_failed: bool,
}

impl Outcome {
    fn new(results: Value, table: Table) -> Self {
        Outcome {
            results,
            derived: json!({}),
            table,
            expectation_failed: false,
        }
    }

    fn with_derived(mut self, derived: Value) -> Self {
        self.derived = derived;
        self
    }
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let out = dispatch(config)?;
    Ok(RunReport {
        tool: "landscape-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        config: config.clone(),
        results: out.results,
        derived: out.derived,
        wall_time_s: start.elapsed().as_secs_f64(),
        table: out.table,
        expectation_failed: out.expectation_failed,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

/// Interleaved (re, im) row-major entries.
fn complex_matrix(m: &CMat) -> Value {
    let mut data = Vec::with_capacity(2 * m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            data.push(m[(r, c)].re);
            data.push(m[(r, c)].im);
        }
    }
    json!({"rows": m.nrows(), "cols": m.ncols(), "data": data})
}

fn real_matrix(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

fn push_complex_entries(table: &mut Table, label: Cell, m: &CMat) {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            table.push(vec![
                label.clone(),
                Cell::from(r),
                Cell::from(c),
                Cell::from(m[(r, c)].re),
                Cell::from(m[(r, c)].im),
            ]);
        }
    }
}

fn control_metadata(dim: usize, segments: usize) -> Value {
    let constraints = dim * dim - 1;
    let controls = constraints * segments;
    json!({
        "K": controls,
        "N_constraints": constraints,
        "beta": controls as f64 / constraints as f64,
    })
}

fn validate_dynamics(d: &Dynamics) -> Result<f64, CliError> {
    if d.dim < 2 {
        return Err(CliError::Config(format!("N must be >= 2, got {}", d.dim)));
    }
    if !(d.horizon > 0.0 && d.horizon.is_finite()) {
        return Err(CliError::Config(format!("T must be positive, got {}", d.horizon)));
    }
    if d.segments == 0 {
        return Err(CliError::Config("Z must be >= 1".into()));
    }
    let kappa = d.kappa.resolve(d.horizon);
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(CliError::Config(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    Ok(kappa)
}

fn make_grid(
    kind: ControlsKind,
    basis: &BasisSet,
    d: &Dynamics,
    kappa: f64,
    rng: &mut ChaCha8Rng,
) -> crate::Result<ControlGrid> {
    match kind {
        ControlsKind::Zero => ControlGrid::zeros(basis.len(), d.segments, d.horizon, kappa),
        ControlsKind::Upper => ControlGrid::upper_corner(basis.len(), d.segments, d.horizon, kappa),
        ControlsKind::Random => ControlGrid::random_uniform(basis.len(), d.segments, d.horizon, kappa, rng),
    }
}

/// Builds the system for `kind`; the returned generator continues the same
/// seeded stream for any control draws that follow.
fn make_system(
    kind: SystemKind,
    d: &Dynamics,
    kappa: f64,
    seed: u64,
) -> Result<(QuantumSystem, BasisSet, ChaCha8Rng), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SystemKind::Trap => {
            if d.dim != 2 {
                return Err(CliError::Config(format!(
                    "the trap system is two-level, got N = {}",
                    d.dim
                )));
            }
            let inst = boundary_trap_instance(d.horizon, d.segments, kappa)?;
            Ok((inst.system, inst.basis, rng))
        }
        SystemKind::Random => {
            let basis = build_su_basis(d.dim)?;
            let system = QuantumSystem::random(d.dim, &mut rng)?;
            Ok((system, basis, rng))
        }
    }
}

fn parse_coord(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("coordinate must look like 'j,z', got '{s}'"));
    let (j, z) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        j.trim().parse().map_err(|_| bad())?,
        z.trim().parse().map_err(|_| bad())?,
    ))
}

fn ascent_params(a: &super::args::AscentArgs, config: &RunConfig) -> AscentParams {
    AscentParams {
        gtol: a.gtol,
        max_iters: a.max_iters,
        armijo: a.armijo,
        tol: config.tolerances,
        ..AscentParams::default()
    }
}

type RealFn = fn(f64) -> f64;

fn census_functions(f: CensusFn) -> (RealFn, RealFn) {
    match f {
        CensusFn::Sin => (f64::sin, f64::cos),
        CensusFn::Sinc => (|x| x.sin() / x, |x| (x * x.cos() - x.sin()) / (x * x)),
        CensusFn::Cubic => (|x| x * x * x - 3.0 * x, |x| 3.0 * x * x - 3.0),
        CensusFn::Const => (|_| 1.0, |_| 0.0),
    }
}

fn kind_label(k: CriticalKind) -> &'static str {
    match k {
        CriticalKind::Max => "max",
        CriticalKind::Min => "min",
    }
}

fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let seed = config.seed;
    let tol = &config.tolerances;
    match &config.command {
        Command::Basis { dim } => {
            if *dim < 2 {
                return Err(CliError::Config(format!("N must be >= 2, got {dim}")));
            }
            let basis = build_su_basis(*dim)?;
            let mut table = Table::new(&["index", "row", "col", "re", "im"]);
            for (k, b) in basis.elements().iter().enumerate() {
                push_complex_entries(&mut table, Cell::from(k), b);
            }
            let elements: Vec<Value> = basis.elements().iter().map(complex_matrix).collect();
            Ok(Outcome::new(
                json!({"N": dim, "algebra_dim": basis.len(), "elements": elements}),
                table,
            ))
        }

        Command::Propagate { dynamics, controls } => {
            let kappa = validate_dynamics(dynamics)?;
            let basis = build_su_basis(dynamics.dim)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let grid = make_grid(*controls, &basis, dynamics, kappa, &mut rng)?;
            let prop = propagate(&grid, &basis)?;
            let mut table = Table::new(&["segment", "row", "col", "re", "im"]);
            for (z, u) in prop.segment_unitaries.iter().enumerate() {
                push_complex_entries(&mut table, Cell::from(z), u);
            }
            push_complex_entries(&mut table, Cell::from("total"), &prop.total);
            let results = json!({
                "kappa": kappa,
                "controls": real_matrix(grid.values()),
                "segment_unitaries": prop.segment_unitaries.iter().map(complex_matrix).collect::<Vec<_>>(),
                "total": complex_matrix(&prop.total),
                "unitarity_defect": unitarity_defect(&prop.total),
            });
            Ok(Outcome::new(results, table).with_derived(control_metadata(dynamics.dim, dynamics.segments)))
        }

        Command::Scan {
            dynamics,
            system,
            base,
            coord1,
            coord2,
            steps,
        } => {
            let kappa = validate_dynamics(dynamics)?;
            let (c1, c2) = (parse_coord(coord1)?, parse_coord(coord2)?);
            let (sys, basis, mut rng) = make_system(*system, dynamics, kappa, seed)?;
            let grid = make_grid(*base, &basis, dynamics, kappa, &mut rng)?;
            let points = scan_plane(&sys, &grid, &basis, c1, c2, *steps)?;
            let mut table = Table::new(&["x1", "x2", "j", "g1", "g2"]);
            for p in &points {
                table.push(vec![p.x1.into(), p.x2.into(), p.j.into(), p.g1.into(), p.g2.into()]);
            }
            let results = json!({
                "kappa": kappa,
                "coord1": [c1.0, c1.1],
                "coord2": [c2.0, c2.1],
                "range": to_value(&objective_range(&sys)),
                "points": to_value(&points),
            });
            Ok(Outcome::new(results, table).with_derived(control_metadata(dynamics.dim, dynamics.segments)))
        }

        Command::Ascent {
            dynamics,
            system,
            start,
            ascent,
        } => {
            let kappa = validate_dynamics(dynamics)?;
            let (sys, basis, mut rng) = make_system(*system, dynamics, kappa, seed)?;
            let grid = make_grid(*start, &basis, dynamics, kappa, &mut rng)?;
            let trace = gradient_ascent(&sys, &grid, &basis, &ascent_params(ascent, config))?;
            let mut table = Table::new(&["iter", "j", "projected_grad_norm"]);
            for s in &trace.iterates {
                table.push(vec![s.iter.into(), s.j.into(), s.projected_grad_norm.into()]);
            }
            let t = &trace.terminal;
            let results = json!({
                "kappa": kappa,
                "range": to_value(&objective_range(&sys)),
                "iterates": to_value(&trace.iterates),
                "converged": trace.converged,
                "stalled": trace.stalled,
                "terminal": {
                    "j_value": t.j_value,
                    "classification": t.classification.as_str(),
                    "grad_norm_projected": t.grad_norm_projected,
                    "active_count": t.active_set.len(),
                    "hessian_eigenvalues": t.hessian_eigenvalues,
                    "hessian_asymmetry": t.hessian_asymmetry,
                    "degenerate": t.degenerate,
                    "min_outward_component": t.min_outward_component,
                    "location": real_matrix(t.location.values()),
                },
            });
            Ok(Outcome::new(results, table).with_derived(control_metadata(dynamics.dim, dynamics.segments)))
        }

        Command::Basins {
            dynamics,
            system,
            count,
            ascent,
        } => {
            let kappa = validate_dynamics(dynamics)?;
            let (sys, basis, _) = make_system(*system, dynamics, kappa, seed)?;
            let sampler = BasinSampler {
                count: *count,
                seed,
                kappa,
                segments: dynamics.segments,
                horizon: dynamics.horizon,
            };
            let census = basin_census(&sys, &basis, &sampler, &ascent_params(ascent, config))?;
            let mut table = Table::new(&[
                "run",
                "seed",
                "start_j",
                "terminal_j",
                "iterations",
                "converged",
                "classification",
                "trapped",
            ]);
            for r in &census.records {
                table.push(vec![
                    r.run.into(),
                    r.seed.into(),
                    r.start_j.into(),
                    r.terminal_j.into(),
                    r.iterations.into(),
                    r.converged.into(),
                    r.classification.as_str().into(),
                    r.trapped.into(),
                ]);
            }
            let mut results = to_value(&census);
            results["kappa"] = json!(kappa);
            Ok(Outcome::new(results, table).with_derived(control_metadata(dynamics.dim, dynamics.segments)))
        }

        Command::Rank {
            dynamics,
            controls,
            rank_tol,
            samples,
        } => {
            let kappa = validate_dynamics(dynamics)?;
            let basis = build_su_basis(dynamics.dim)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let grid = make_grid(*controls, &basis, dynamics, kappa, &mut rng)?;
            let tm = psi_tangent_map(&grid, &basis)?;
            let rank = local_surjectivity_rank(&tm, *rank_tol);
            let cone = boundary_cone_surjectivity(&grid, &tm, tol.active, *samples, seed);
            let thr = kappa_threshold(&basis, dynamics.horizon, dynamics.segments)?;
            let table = Table::key_value(vec![
                ("kappa", kappa.into()),
                ("rank", rank.rank.into()),
                ("algebra_dim", tm.algebra_dim().into()),
                ("rank_surjective", rank.surjective.into()),
                ("cone_surjective", cone.surjective.into()),
                ("active_count", cone.active_count.into()),
                ("directions_tested", cone.directions_tested.into()),
                ("unreachable_count", cone.unreachable_count.into()),
                ("kappa_thr", thr.kappa.into()),
                ("kappa_thr_exact", thr.exact.into()),
            ]);
            let results = json!({
                "kappa": kappa,
                "rank": to_value(&rank),
                "cone": to_value(&cone),
                "kappa_thr": to_value(&thr),
                "kappa_admitted": thr.admits(kappa),
            });
            Ok(Outcome::new(results, table).with_derived(control_metadata(dynamics.dim, dynamics.segments)))
        }

        Command::CeBoundary {
            horizon,
            segments,
            kappa,
            samples,
            radius_rel,
            expect_trap,
        } => {
            let d = Dynamics {
                dim: 2,
                horizon: *horizon,
                segments: *segments,
                kappa: *kappa,
            };
            let kappa = validate_dynamics(&d)?;
            if !(*radius_rel > 0.0 && *radius_rel < 1.0) {
                return Err(CliError::Config(format!(
                    "radius_rel must lie in (0, 1), got {radius_rel}"
                )));
            }
            let inst = boundary_trap_instance(*horizon, *segments, kappa)?;
            let v = verify_boundary_trap(&inst, *samples, radius_rel * kappa, seed)?;
            let table = Table::key_value(vec![
                ("kappa", kappa.into()),
                ("alpha", inst.alpha.into()),
                ("kappa_thr", inst.kappa_thr.into()),
                ("is_trap", v.is_trap.into()),
                ("j_at_corner", v.j_at_corner.into()),
                ("j_global_max", v.j_global_max.into()),
                ("max_inward_gain", v.max_inward_gain.into()),
                ("min_outward_component", v.min_outward_component.into()),
                ("samples", v.samples.into()),
                ("radius", v.radius.into()),
            ]);
            let mut results = to_value(&v);
            results["kappa"] = json!(kappa);
            results["alpha"] = json!(inst.alpha);
            results["kappa_thr"] = json!(inst.kappa_thr);
            let mut out = Outcome::new(results, table).with_derived(control_metadata(2, *segments));
            out.expectation_failed = *expect_trap && !v.is_trap;
            Ok(out)
        }

        Command::CeSlice {
            steps,
            c_min,
            c_max,
            margin,
        } => {
            let census = slice_census_2d(*c_min, *c_max, *steps, *margin)?;
            let mut table = Table::new(&["c", "max_loc", "max_val", "min_loc", "min_val"]);
            for row in &census.per_slice {
                let e = &row.closed_form;
                table.push(vec![
                    e.c.into(),
                    e.max_loc.into(),
                    e.max_val.into(),
                    e.min_loc.into(),
                    e.min_val.into(),
                ]);
            }
            let (loc_gap, val_gap) = census.max_disagreement();
            let mut results = to_value(&census);
            results["max_location_disagreement"] = json!(loc_gap);
            results["max_value_disagreement"] = json!(val_gap);
            Ok(Outcome::new(results, table))
        }

        Command::CeScan2d { grid_steps, margin } => {
            let scan = analytic2d_trap_free_scan(*grid_steps, *margin)?;
            let table = Table::key_value(vec![
                ("min_grad_norm", scan.min_grad_norm.into()),
                ("argmin_e1", scan.argmin.0.into()),
                ("argmin_e2", scan.argmin.1.into()),
                ("grid_steps", scan.grid_steps.into()),
                ("margin", scan.margin.into()),
            ]);
            Ok(Outcome::new(to_value(&scan), table))
        }

        Command::Census1d {
            function,
            a,
            b,
            grid_points,
        } => {
            let (f, df) = census_functions(*function);
            let census = critical_value_census_1d(f, df, (*a, *b), *grid_points, tol)?;
            let mut table = Table::new(&["x", "value", "kind"]);
            for ((x, v), k) in census
                .critical_points
                .iter()
                .zip(&census.critical_values)
                .zip(&census.kinds)
            {
                table.push(vec![(*x).into(), (*v).into(), kind_label(*k).into()]);
            }
            let mut results = to_value(&census);
            results["count"] = json!(census.critical_points.len());
            results["distinct_count"] = json!(census.distinct_values.len());
            Ok(Outcome::new(results, table))
        }

        Command::KappaThr { dim, horizon, segments } => {
            if *dim < 2 {
                return Err(CliError::Config(format!("N must be >= 2, got {dim}")));
            }
            let basis = build_su_basis(*dim)?;
            let thr = kappa_threshold(&basis, *horizon, *segments)?;
            let table = Table::key_value(vec![("kappa_thr", thr.kappa.into()), ("exact", thr.exact.into())]);
            Ok(Outcome::new(to_value(&thr), table).with_derived(control_metadata(*dim, *segments)))
        }
    }
}
