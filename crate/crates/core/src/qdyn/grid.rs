use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};

/// Bounded piecewise-constant control amplitudes.
///
/// Row `j` drives generator B_j, column `z` is the z-th segment
/// `(zT/Z, (z+1)T/Z]` (zero-based). Every entry satisfies `|ε| <= κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid {
    horizon: f64,
    bound: f64,
    values: DMatrix<f64>,
}

impl ControlGrid {
    pub fn new(horizon: f64, bound: f64, values: DMatrix<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain(format!("horizon T must be positive, got {horizon}")));
        }
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(Error::domain(format!("bound kappa must be >= 0, got {bound}")));
        }
        if values.ncols() == 0 {
            return Err(Error::domain("need at least one segment"));
        }
        for j in 0..values.nrows() {
            for z in 0..values.ncols() {
                let value = values[(j, z)];
                if !value.is_finite() || value.abs() > bound {
                    return Err(Error::ControlOutOfBounds { j, z, value, bound });
                }
            }
        }
        Ok(ControlGrid { horizon, bound, values })
    }

    pub fn constant(rows: usize, segments: usize, horizon: f64, bound: f64, value: f64) -> Result<Self> {
        Self::new(horizon, bound, DMatrix::from_element(rows, segments, value))
    }

    pub fn zeros(rows: usize, segments: usize, horizon: f64, bound: f64) -> Result<Self> {
        Self::constant(rows, segments, horizon, bound, 0.0)
    }

    /// Every control at its upper bound `+κ`.
    pub fn upper_corner(rows: usize, segments: usize, horizon: f64, bound: f64) -> Result<Self> {
        Self::constant(rows, segments, horizon, bound, bound)
    }

    /// Uniform draw from `[−κ, κ]^{rows × segments}`.
    pub fn random_uniform<R: Rng + ?Sized>(
        rows: usize,
        segments: usize,
        horizon: f64,
        bound: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let values = DMatrix::from_fn(rows, segments, |_, _| {
            if bound > 0.0 {
                rng.random_range(-bound..=bound)
            } else {
                0.0
            }
        });
        Self::new(horizon, bound, values)
    }

    /// Same horizon and bound, new amplitudes.
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Self> {
        Self::new(self.horizon, self.bound, values)
    }

    /// Same amplitudes under a wider bound. Used for finite-difference probes
    /// that may step slightly outside the box.
    pub(crate) fn widened(&self, values: DMatrix<f64>, extra: f64) -> Result<Self> {
        Self::new(self.horizon, self.bound + extra.abs(), values)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn segments(&self) -> usize {
        self.values.ncols()
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    /// Total number of control parameters, rows × segments.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, j: usize, z: usize) -> f64 {
        self.values[(j, z)]
    }

    /// Duration of one segment, T/Z.
    pub fn segment_duration(&self) -> f64 {
        self.horizon / self.segments() as f64
    }

    /// Start and end time of segment `z`.
    pub fn segment_interval(&self, z: usize) -> (f64, f64) {
        let dt = self.segment_duration();
        (z as f64 * dt, (z + 1) as f64 * dt)
    }

    /// Flat index of `(j, z)` used for tangent-map rows and parameter vectors.
    pub fn flat_index(&self, j: usize, z: usize) -> usize {
        j * self.segments() + z
    }

    pub fn unflat_index(&self, k: usize) -> (usize, usize) {
        (k / self.segments(), k % self.segments())
    }

    /// Parameters in flat `(j, z)` order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.rows() {
            for z in 0..self.segments() {
                out.push(self.values[(j, z)]);
            }
        }
        out
    }

    pub fn flat_to_matrix(&self, flat: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows(), self.segments(), flat)
    }
}
