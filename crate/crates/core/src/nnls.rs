//! Lawson-Hanson nonnegative least squares.

use nalgebra::{DMatrix, DVector};

/// argmin ||A x - b|| subject to x >= 0.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let tol = 1e-14 * (1.0 + a.amax()) * (1.0 + b.amax()) * n.max(1) as f64;
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let next = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match next {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => break,
        }
        loop {
            let s = solve_passive(a, b, &passive);
            let bad: Vec<usize> = (0..n).filter(|&i| passive[i] && s[i] <= 0.0).collect();
            if bad.is_empty() {
                x = s;
                break;
            }
            let alpha = bad
                .iter()
                .map(|&i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let mut out = DVector::zeros(passive.len());
    if cols.is_empty() {
        return out;
    }
    let sub = a.select_columns(&cols);
    let sol = sub
        .svd(true, true)
        .solve(b, 1e-13)
        .unwrap_or_else(|_| DVector::zeros(cols.len()));
    for (k, &i) in cols.iter().enumerate() {
        out[i] = sol[k];
    }
    out
}
