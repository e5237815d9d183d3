use nalgebra::{DMatrix, DVector};

/// Non-negative least squares `min ‖A x − b‖, x ≥ 0` (Lawson–Hanson active set).
///
/// Returns the minimizer and its residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    if n == 0 {
        return (x, b.norm());
    }
    let scale = a.norm().max(1.0) * b.norm().max(1.0);
    let tol = 1e-13 * scale;
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n).filter(|&j| !passive[j]).max_by(|&p, &q| w[p].total_cmp(&w[q]));
        let Some(t) = candidate else { break };
        if w[t] <= tol {
            break;
        }
        passive[t] = true;

        loop {
            let s = solve_on_passive(a, b, &passive);
            let feasible = (0..n).filter(|&j| passive[j]).all(|j| s[j] > 0.0);
            if feasible {
                x = s;
                break;
            }
            let mut alpha = f64::INFINITY;
            for j in (0..n).filter(|&j| passive[j] && s[j] <= 0.0) {
                let denom = x[j] - s[j];
                if denom > 0.0 {
                    alpha = alpha.min(x[j] / denom);
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            x += (&s - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= tol {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }

    let residual = (a * &x - b).norm();
    (x, residual)
}

fn solve_on_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let sub = a.select_columns(&idx);
    let svd = sub.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1e-300);
    let sol = svd.solve(b, eps).expect("SVD with both factors");
    let mut full = DVector::zeros(passive.len());
    for (k, &j) in idx.iter().enumerate() {
        full[j] = sol[k];
    }
    full
}
