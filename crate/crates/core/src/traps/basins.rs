use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{objective_range, ObjectiveRange, QuantumSystem};
use crate::qdyn::{BasisSet, ControlGrid};
use crate::traps::{gradient_ascent, AscentParams, Classification};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinSampler {
    pub count: usize,
    pub seed: u64,
    pub kappa: f64,
    pub segments: usize,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinRecord {
    pub run: usize,
    pub seed: u64,
    pub start_j: f64,
    pub terminal_j: f64,
    pub iterations: usize,
    pub converged: bool,
    pub classification: Classification,
    pub trapped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinCensus {
    pub trapped_fraction: f64,
    pub range: ObjectiveRange,
    pub success_threshold: f64,
    pub records: Vec<BasinRecord>,
}

/// Multistart ascent from uniform random points of the control box.
///
/// Run `i` draws its start from a generator seeded with `seed + i`, so the
/// result does not depend on how runs are scheduled.
pub fn basin_census(
    system: &QuantumSystem,
    basis: &BasisSet,
    sampler: &BasinSampler,
    params: &AscentParams,
) -> Result<BasinCensus> {
    if sampler.count == 0 {
        return Err(Error::domain("basin census needs at least one start"));
    }
    let range = objective_range(system);
    let margin = params.tol.success_margin_rel * range.width();
    let success_threshold = range.j_max - margin;

    let runs = crate::par::map_indexed(sampler.count, |run| -> Result<BasinRecord> {
        let seed = sampler.seed.wrapping_add(run as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start =
            ControlGrid::random_uniform(basis.len(), sampler.segments, sampler.horizon, sampler.kappa, &mut rng)?;
        let trace = gradient_ascent(system, &start, basis, params)?;
        let terminal_j = trace.terminal_j();
        let trapped = range.width() > 0.0 && terminal_j < success_threshold;
        Ok(BasinRecord {
            run,
            seed,
            start_j: trace.iterates[0].j,
            terminal_j,
            iterations: trace.iterations(),
            converged: trace.converged,
            classification: trace.terminal.classification,
            trapped,
        })
    });
    let records = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let trapped = records.iter().filter(|r| r.trapped).count();
    Ok(BasinCensus {
        trapped_fraction: trapped as f64 / records.len() as f64,
        range,
        success_threshold,
        records,
    })
}
