//! One signal for all segments.
//!
//! Every consumer's gain peaks at v = 0 and falls off monotonically on each
//! side, so consumers form a window of consecutive types around the median
//! and only the window's end types constrain the signal. Within a window
//! the attention maximizer is full disclosure, the personalized signal of
//! one end type, or a signal on which both ends bind. The latter lies on the
//! ray mu_R = r |mu_L|, r = |v1| / v2, along which V is linear and I convex.

use serde::Serialize;

use super::personalized::personalized_for_value;
use super::{Regime, SignalSolveResult, BOUNDARY_TOL};
use crate::error::Result;
use crate::model::{CostKind, ModelSpec};
use crate::numeric::{golden_max, Tolerances};
use crate::signals::{binary_cost, gain_for_value, BinarySignal, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticipationStatus {
    Binding,
    Slack,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeParticipation {
    pub k: i32,
    pub v: f64,
    pub value: f64,
    /// V - lambda I.
    pub slack: f64,
    pub status: ParticipationStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BroadcastSolution {
    pub result: SignalSolveResult,
    /// Consumer window (k1, k2); `None` when degenerate.
    pub window: Option<(i32, i32)>,
    pub demand: f64,
    pub profit: f64,
    /// Another window with a different signal attains the same profit.
    pub tie: bool,
    pub participation: Vec<TypeParticipation>,
    /// Some voter does not consume the signal.
    pub excludes_voters: bool,
}

struct Candidate {
    mu: (f64, f64),
    attention: f64,
    window: (i32, i32),
    profit: f64,
    demand: f64,
}

/// Largest x in (0, x_max] with v1 + r x - lambda (r h(x) + h(r x)) >= 0.
fn ray_root(v1: f64, r: f64, lambda: f64, cost: CostKind) -> Option<f64> {
    let x_max = (1.0f64).min(1.0 / r);
    let slack = |x: f64| v1 + r * x - lambda * (r * cost.h(x) + cost.h(r * x));
    let (x_peak, s_peak) = golden_max(slack, 0.0, x_max, 1e-14);
    if s_peak < 0.0 || x_peak <= 0.0 {
        return None;
    }
    if slack(x_max) >= 0.0 {
        return Some(x_max);
    }
    let (mut lo, mut hi) = (x_peak, x_max);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slack(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

pub(crate) fn solve(spec: &ModelSpec, a: f64, tol: &Tolerances) -> Result<BroadcastSolution> {
    let lambda = spec.lambda();
    let cost = spec.cost();
    let types: Vec<i32> = spec.types().collect();
    let vs: Vec<f64> = types.iter().map(|&k| spec.v_sym(a, k)).collect();
    let q = spec.populations();
    let kk = spec.k_max() as i32;

    let personal: Vec<SignalSolveResult> = vs
        .iter()
        .map(|&v| personalized_for_value(v, lambda, cost, tol))
        .collect::<Result<_>>()?;

    let consumers = |l: f64, r: f64, att: f64| -> Vec<bool> {
        vs.iter()
            .map(|&v| gain_for_value(l, r, v) - lambda * att >= -tol.tol_bind)
            .collect()
    };

    let mut best: Option<Candidate> = None;
    let mut tie = false;
    for k1 in -kk..=0 {
        for k2 in 0..=kk {
            let (i1, i2) = (spec.idx(k1), spec.idx(k2));
            let mut options: Vec<(f64, f64)> = vec![(-1.0, 1.0)];
            for i in [i1, i2] {
                if let Some(b) = personal[i].binary() {
                    options.push((b.mu_l(), b.mu_r()));
                }
            }
            let (v1, v2) = (vs[i1], vs[i2]);
            if v1 < 0.0 && v2 > 0.0 {
                let r = -v1 / v2;
                if let Some(x) = ray_root(v1, r, lambda, cost) {
                    options.push((-x, r * x));
                }
            }
            for (l, r) in options {
                let att = binary_cost(l, r, cost);
                let takes = consumers(l, r, att);
                if !(i1..=i2).all(|i| takes[i]) {
                    continue;
                }
                let demand: f64 = takes.iter().zip(q).filter(|(t, _)| **t).map(|(_, q)| q).sum();
                let profit = att * demand;
                if profit <= 0.0 {
                    continue;
                }
                let cand = Candidate {
                    mu: (l, r),
                    attention: att,
                    window: (k1, k2),
                    profit,
                    demand,
                };
                match &best {
                    None => best = Some(cand),
                    Some(b) => {
                        let scale = 1e-12 * b.profit.max(1.0);
                        if cand.profit > b.profit + scale {
                            best = Some(cand);
                            tie = false;
                        } else if (cand.profit - b.profit).abs() <= scale {
                            let differs = (cand.mu.0 - b.mu.0).abs() > 1e-9 || (cand.mu.1 - b.mu.1).abs() > 1e-9;
                            if differs {
                                tie = true;
                            }
                            let wider = cand.window.1 - cand.window.0 > b.window.1 - b.window.0;
                            if wider {
                                best = Some(cand);
                            }
                        }
                    }
                }
            }
        }
    }

    let Some(best) = best else {
        let participation = types
            .iter()
            .zip(&vs)
            .map(|(&k, &v)| TypeParticipation {
                k,
                v,
                value: 0.0,
                slack: 0.0,
                status: ParticipationStatus::Excluded,
            })
            .collect();
        return Ok(BroadcastSolution {
            result: SignalSolveResult::degenerate(None),
            window: None,
            demand: 0.0,
            profit: 0.0,
            tie: false,
            participation,
            excludes_voters: true,
        });
    };

    let (l, r) = best.mu;
    let sig = BinarySignal::new(l, r)?;
    let participation: Vec<TypeParticipation> = types
        .iter()
        .zip(&vs)
        .map(|(&k, &v)| {
            let value = gain_for_value(l, r, v);
            let slack = value - lambda * best.attention;
            let status = if slack < -tol.tol_bind {
                ParticipationStatus::Excluded
            } else if slack.abs() < tol.tol_bind {
                ParticipationStatus::Binding
            } else {
                ParticipationStatus::Slack
            };
            TypeParticipation { k, v, value, slack, status }
        })
        .collect();
    let consuming = participation.iter().filter(|p| p.status != ParticipationStatus::Excluded);
    let (value, slack) = consuming.fold((f64::INFINITY, f64::INFINITY), |(v, s), p| (v.min(p.value), s.min(p.slack)));
    let regime = if sig.is_full_disclosure() {
        Regime::FullDisclosure
    } else {
        Regime::BindingParticipation
    };
    Ok(BroadcastSolution {
        result: SignalSolveResult {
            signal: Signal::Binary(sig),
            regime,
            effective_cost: None,
            attention: best.attention,
            value,
            slack,
            boundary: sig.at_boundary(BOUNDARY_TOL),
            path_monotone: true,
        },
        window: Some(best.window),
        demand: best.demand,
        profit: best.profit,
        tie,
        excludes_voters: participation.iter().any(|p| p.status == ParticipationStatus::Excluded),
        participation,
    })
}
