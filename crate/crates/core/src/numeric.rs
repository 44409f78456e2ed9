//! Scalar root finding and maximization shared by the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solver tolerances, overridable from scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Bracket width at which bisections stop.
    pub tol_root: f64,
    /// Maximum participation slack accepted as binding.
    pub tol_bind: f64,
    /// Iteration budget for each bisection.
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_root: 1e-10,
            tol_bind: 1e-9,
            max_iter: 100,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`; the endpoints are compared as well so that
/// monotone objectives resolve to the boundary exactly.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    if hi - lo <= tol {
        let x = 0.5 * (lo + hi);
        return (x, f(x));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Bisection for a sign change of `f` on `[lo, hi]`, where `f(lo)` and
/// `f(hi)` have opposite signs (zero counts as the sign of `hi`). Returns
/// the final bracket `(lo, hi)`, which keeps the sign of each end.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
    stage: &'static str,
) -> Result<(f64, f64)> {
    let f_lo = f(lo);
    let lo_nonneg = f_lo >= 0.0;
    let f_hi = f(hi);
    if (f_hi >= 0.0) == lo_nonneg {
        return Err(Error::NumericFailure {
            stage,
            iterations: 0,
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    let mut it = 0;
    while hi - lo > tol {
        if it >= max_iter {
            return Err(Error::NumericFailure {
                stage,
                iterations: it,
                residual: hi - lo,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) >= 0.0) == lo_nonneg {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    Ok((lo, hi))
}

/// Evenly spaced grid of `n` points covering `[lo, hi]` (a single point
/// `lo` when `n == 1`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(fx.abs() < 1e-12);
    }

    #[test]
    fn golden_prefers_boundary_for_monotone() {
        let (x, _) = golden_max(|x| x, 0.0, 2.0, 1e-9);
        assert_eq!(x, 2.0);
    }

    #[test]
    fn bisect_keeps_signs() {
        let (lo, hi) = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200, "sqrt").unwrap();
        assert!(lo * lo - 2.0 < 0.0 && hi * hi - 2.0 >= 0.0);
        assert!((hi - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(|x| x + 5.0, 0.0, 1.0, 1e-9, 100, "t").is_err());
    }

    #[test]
    fn linspace_hits_ends() {
        let g = linspace(0.5, 3.0, 6);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[5], 3.0);
    }
}
