//! max_Pi V - lambda~ I by concavification.
//!
//! The value of posterior mu is the upper envelope of two concave branches,
//! one per vote: f_L(mu) = -[v]+ - c h(mu) and f_R(mu) = v + mu - [v]+ - c h(mu).
//! The optimal split of the prior is the common tangent of the branches.
//! For slope s the tangent points are mu_L(s) = h'^-1(-s/c) and
//! mu_R(s) = h'^-1((1-s)/c); the intercept gap c_L(s) - c_R(s) has slope
//! mu_R(s) - mu_L(s) >= 0, so its root is found by bisection.

use super::{Regime, SignalSolveResult, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::model::CostKind;
use crate::numeric::Tolerances;
use crate::signals::{binary_cost, gain_for_value, BinarySignal, Signal};

const BRACKET_LIMIT: usize = 64;
const SLOPE_ITER: usize = 200;

/// Tangent points of the common tangent, or `None` when no informative
/// split beats the prior.
pub(crate) fn tangent_posteriors(v: f64, c: f64, cost: CostKind) -> Result<Option<(f64, f64)>> {
    let pv = v.max(0.0);
    let mu_l = |s: f64| cost.h_prime_inv(-s / c);
    let mu_r = |s: f64| cost.h_prime_inv((1.0 - s) / c);
    let gap = |s: f64| {
        let l = mu_l(s);
        let r = mu_r(s);
        let c_l = -pv - c * cost.h(l) - s * l;
        let c_r = v + r - pv - c * cost.h(r) - s * r;
        c_l - c_r
    };

    let s_star = if v == 0.0 {
        0.5
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut n = 0;
        while gap(lo) >= 0.0 {
            lo = 2.0 * lo - 1.0;
            n += 1;
            if n > BRACKET_LIMIT {
                return Ok(None);
            }
        }
        n = 0;
        while gap(hi) < 0.0 {
            hi = 2.0 * hi + 1.0;
            n += 1;
            if n > BRACKET_LIMIT {
                return Ok(None);
            }
        }
        let mut it = 0;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if gap(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            it += 1;
            if it > SLOPE_ITER {
                return Err(Error::NumericFailure {
                    stage: "competitive slope",
                    iterations: it,
                    residual: hi - lo,
                });
            }
        }
        0.5 * (lo + hi)
    };

    let (l, r) = (mu_l(s_star), mu_r(s_star));
    if !(l < 0.0 && r > 0.0) {
        return Ok(None);
    }
    let net = gain_for_value(l, r, v) - c * binary_cost(l, r, cost);
    if net > 0.0 {
        Ok(Some((l, r)))
    } else {
        Ok(None)
    }
}

/// Competitive signal for a voter with valuation difference `v`.
pub fn competitive_for_value(v: f64, c: f64, cost: CostKind, _tol: &Tolerances) -> Result<SignalSolveResult> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("effective cost {c} must be positive")));
    }
    if v > 0.0 {
        return Ok(competitive_for_value(-v, c, cost, _tol)?.mirrored());
    }
    Ok(match tangent_posteriors(v, c, cost)? {
        None => SignalSolveResult::degenerate(Some(c)),
        Some((l, r)) => {
            let sig = BinarySignal::new(l, r)?;
            let attention = binary_cost(l, r, cost);
            let value = gain_for_value(l, r, v);
            let regime = if sig.is_full_disclosure() {
                Regime::FullDisclosure
            } else {
                Regime::Unconstrained
            };
            SignalSolveResult {
                signal: Signal::Binary(sig),
                regime,
                effective_cost: Some(c),
                attention,
                value,
                slack: value - c * attention,
                boundary: sig.at_boundary(BOUNDARY_TOL),
                path_monotone: true,
            }
        }
    })
}
