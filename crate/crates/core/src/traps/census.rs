use serde::Serialize;

use crate::error::{Error, Result};
use crate::traps::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusResult1D {
    /// Ascending.
    pub critical_points: Vec<f64>,
    pub critical_values: Vec<f64>,
    pub kinds: Vec<CriticalKind>,
    /// Critical values sorted and merged within the merge tolerance.
    pub distinct_values: Vec<f64>,
    /// Grid cells where `|f'|` has a local minimum without a sign change; a
    /// pair of roots may hide there unresolved.
    pub suspect_intervals: Vec<(f64, f64)>,
}

/// Critical points of `f` on `[a, b]` from sign changes of `f'` on a uniform
/// grid of `grid_points` nodes, each refined by bisection.
///
/// A derivative that vanishes identically has no sign changes and yields no
/// critical points.
pub fn critical_value_census_1d<F, D>(
    f: F,
    f_prime: D,
    domain: (f64, f64),
    grid_points: usize,
    tol: &Tolerances,
) -> Result<CensusResult1D>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (a, b) = domain;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "census domain must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if grid_points < 2 {
        return Err(Error::domain("census grid needs at least 2 points"));
    }
    let h = (b - a) / (grid_points - 1) as f64;
    let xs: Vec<f64> = (0..grid_points)
        .map(|i| if i == grid_points - 1 { b } else { a + h * i as f64 })
        .collect();
    let ds: Vec<f64> = xs.iter().map(|&x| f_prime(x)).collect();
    if let Some(i) = ds.iter().position(|d| !d.is_finite()) {
        return Err(Error::domain(format!("derivative is not finite at {}", xs[i])));
    }

    let mut critical_points = Vec::new();
    let mut kinds = Vec::new();
    // last node with a nonzero derivative
    let mut last: Option<usize> = None;
    for i in 0..grid_points {
        if ds[i] == 0.0 {
            continue;
        }
        if let Some(p) = last {
            if ds[p].signum() != ds[i].signum() {
                let root = bisect(&f_prime, xs[p], xs[i], ds[p], tol.root);
                critical_points.push(root);
                kinds.push(if ds[p] > 0.0 {
                    CriticalKind::Max
                } else {
                    CriticalKind::Min
                });
            }
        }
        last = Some(i);
    }

    let mut suspect_intervals = Vec::new();
    for i in 1..grid_points.saturating_sub(1) {
        let (l, m, r) = (ds[i - 1], ds[i], ds[i + 1]);
        let same_sign = l.signum() == m.signum() && m.signum() == r.signum() && m != 0.0;
        if same_sign && m.abs() < l.abs() && m.abs() < r.abs() {
            suspect_intervals.push((xs[i - 1], xs[i + 1]));
        }
    }

    let critical_values: Vec<f64> = critical_points.iter().map(|&x| f(x)).collect();
    let mut sorted = critical_values.clone();
    sorted.sort_by(f64::total_cmp);
    let mut distinct_values: Vec<f64> = Vec::new();
    for v in sorted {
        match distinct_values.last() {
            Some(&prev) if (v - prev).abs() <= tol.merge => {}
            _ => distinct_values.push(v),
        }
    }

    Ok(CensusResult1D {
        critical_points,
        critical_values,
        kinds,
        distinct_values,
        suspect_intervals,
    })
}

fn bisect<D: Fn(f64) -> f64>(d: &D, mut lo: f64, mut hi: f64, d_lo: f64, tol: f64) -> f64 {
    let lo_sign = d_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let dm = d(mid);
        if dm == 0.0 {
            return mid;
        }
        if dm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
