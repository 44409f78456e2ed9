//! max I subject to V >= lambda I for a single segment.
//!
//! With multiplier gamma on participation the Lagrangian is proportional to
//! V - (lambda - 1/gamma) I, so every binding optimum is a competitive
//! optimum at some effective cost lambda~ in (0, lambda]. Lowering lambda~
//! makes the signal more informative and the residual V - lambda I smaller;
//! the solution is the smallest lambda~ whose signal still participates.

use super::competitive::tangent_posteriors;
use super::{Regime, SignalSolveResult, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::model::CostKind;
use crate::numeric::Tolerances;
use crate::signals::{binary_cost, gain_for_value, BinarySignal, Signal};

/// Lower end of the effective-cost bracket.
pub const EFFECTIVE_COST_FLOOR: f64 = 1e-10;

struct Probe {
    cost: f64,
    posteriors: Option<(f64, f64)>,
    residual: f64,
}

fn probe(v: f64, lambda: f64, c: f64, cost: CostKind) -> Result<Probe> {
    let posteriors = tangent_posteriors(v, c, cost)?;
    let residual = match posteriors {
        Some((l, r)) => gain_for_value(l, r, v) - lambda * binary_cost(l, r, cost),
        None => 0.0,
    };
    Ok(Probe {
        cost: c,
        posteriors,
        residual,
    })
}

fn result_from(v: f64, lambda: f64, cost: CostKind, l: f64, r: f64, regime: Regime, c: Option<f64>) -> Result<SignalSolveResult> {
    let sig = BinarySignal::new(l, r)?;
    let attention = binary_cost(l, r, cost);
    let value = gain_for_value(l, r, v);
    Ok(SignalSolveResult {
        signal: Signal::Binary(sig),
        regime,
        effective_cost: c,
        attention,
        value,
        slack: value - lambda * attention,
        boundary: sig.at_boundary(BOUNDARY_TOL),
        path_monotone: true,
    })
}

/// Personalized signal for a voter with valuation difference `v`.
pub fn personalized_for_value(v: f64, lambda: f64, cost: CostKind, tol: &Tolerances) -> Result<SignalSolveResult> {
    if v > 0.0 {
        return Ok(personalized_for_value(-v, lambda, cost, tol)?.mirrored());
    }
    // Full disclosure when it already participates; ties favour it.
    if gain_for_value(-1.0, 1.0, v) >= lambda * cost.h(1.0) {
        return result_from(v, lambda, cost, -1.0, 1.0, Regime::FullDisclosure, None);
    }
    let top = probe(v, lambda, lambda, cost)?;
    if top.posteriors.is_none() || top.residual <= tol.tol_bind {
        return Ok(SignalSolveResult::degenerate(None));
    }
    let mut path = vec![(top.cost, top.residual)];
    let bottom = probe(v, lambda, EFFECTIVE_COST_FLOOR.min(0.5 * lambda), cost)?;
    path.push((bottom.cost, bottom.residual));

    let mut hi = top;
    if bottom.residual >= 0.0 && bottom.posteriors.is_some() {
        hi = bottom;
    } else {
        let mut lo = bottom;
        let mut it = 0;
        while hi.cost - lo.cost > tol.tol_root || hi.residual > 0.1 * tol.tol_bind {
            if it >= tol.max_iter {
                return Err(Error::NumericFailure {
                    stage: "personalized effective cost",
                    iterations: it,
                    residual: hi.residual,
                });
            }
            let mid = 0.5 * (lo.cost + hi.cost);
            if mid <= lo.cost || mid >= hi.cost {
                break;
            }
            let p = probe(v, lambda, mid, cost)?;
            path.push((p.cost, p.residual));
            if p.residual >= 0.0 && p.posteriors.is_some() {
                hi = p;
            } else {
                lo = p;
            }
            it += 1;
        }
    }

    let (l, r) = hi.posteriors.expect("feasible probe carries a signal");
    let mut res = result_from(v, lambda, cost, l, r, Regime::BindingParticipation, Some(hi.cost))?;
    if res.slack.abs() >= tol.tol_bind {
        return Err(Error::NumericFailure {
            stage: "personalized participation",
            iterations: path.len(),
            residual: res.slack,
        });
    }
    path.sort_by(|a, b| a.0.total_cmp(&b.0));
    res.path_monotone = path.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
    Ok(res)
}
