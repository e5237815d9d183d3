use serde::Serialize;

use crate::error::{Error, Result};
use crate::landscape::QuantumSystem;
use crate::qdyn::{BasisSet, ControlGrid, SegmentChain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub x1: f64,
    pub x2: f64,
    pub j: f64,
    pub g1: f64,
    pub g2: f64,
}

/// J and its two partial derivatives on a `steps × steps` grid over `[−κ, κ]²`
/// in the controls `c1 = (j, z)` and `c2`, all other controls fixed at `base`.
///
/// Points are ordered with `x1` varying slowest.
pub fn scan_plane(
    system: &QuantumSystem,
    base: &ControlGrid,
    basis: &BasisSet,
    c1: (usize, usize),
    c2: (usize, usize),
    steps: usize,
) -> Result<Vec<ScanPoint>> {
    for &(j, z) in &[c1, c2] {
        if j >= base.rows() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: base.rows(),
            });
        }
        if z >= base.segments() {
            return Err(Error::IndexOutOfRange {
                index: z,
                len: base.segments(),
            });
        }
    }
    if c1 == c2 {
        return Err(Error::domain("scan coordinates must differ"));
    }
    if steps < 2 {
        return Err(Error::domain("scan needs at least 2 steps per axis"));
    }
    let kappa = base.bound();
    let axis: Vec<f64> = (0..steps)
        .map(|i| -kappa + 2.0 * kappa * i as f64 / (steps - 1) as f64)
        .collect();

    let points = crate::par::map_indexed(steps * steps, |k| -> Result<ScanPoint> {
        let (x1, x2) = (axis[k / steps], axis[k % steps]);
        let mut values = base.values().clone();
        values[c1] = x1;
        values[c2] = x2;
        let grid = base.with_values(values)?;
        let chain = SegmentChain::new(&grid, basis)?;
        let j = crate::landscape::objective(system, chain.total())?;
        let g = crate::landscape::gradient::gradient_from_chain(system, &chain)?;
        Ok(ScanPoint {
            x1,
            x2,
            j,
            g1: g.get(c1.0, c1.1),
            g2: g.get(c2.0, c2.1),
        })
    });
    points.into_iter().collect()
}
