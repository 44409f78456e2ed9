//! Susceptibilities and policy latitudes.
//!
//! phi(-a, a', D) = min_{k in D} v(-a, a', k) + mu_L(a, k) measures how far
//! a deviation a' wins coalition D even after unfavorable news. The
//! latitude xi(D) is the largest a at which no deviation attracts D.

use serde::Serialize;

use super::influence::{members, Coalition};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Technology};
use crate::numeric::{golden_max, linspace};
use crate::optimizer::{segment_failure, SignalSolveResult, SignalSolver};

/// Slack allowed when checking that phi increases in a.
pub const MONOTONE_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-12;
const OUTER_TOL: f64 = 1e-13;

/// phi(-a, a', D) from per-type signals ordered -K..=K.
pub fn susceptibility(spec: &ModelSpec, signals: &[SignalSolveResult], a: f64, a_prime: f64, d: Coalition) -> f64 {
    members(d, spec.k_max())
        .into_iter()
        .map(|k| spec.v(-a, a_prime, k) + signals[spec.idx(k)].mu_l())
        .fold(f64::INFINITY, f64::min)
}

/// a' repels k: the voter backs L even after favorable news.
pub fn repels(spec: &ModelSpec, signals: &[SignalSolveResult], a: f64, a_prime: f64, k: i32) -> bool {
    spec.v(-a, a_prime, k) + signals[spec.idx(k)].mu_r() < 0.0
}

/// Decomposition of a singleton latitude: xi = -t(k) + |upsilon_L|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatitudeComponents {
    pub neg_bliss: f64,
    pub belief: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatitudeReport {
    pub target: Vec<i32>,
    pub xi: f64,
    /// The deviation a' maximizing phi at the latitude.
    pub binding_deviation: f64,
    /// (k, mu_L(xi, k)) for each member.
    pub belief_at_latitude: Vec<(i32, f64)>,
    pub components: Option<LatitudeComponents>,
    /// phi never turns positive below a_bar, so xi = a_bar.
    pub saturated: bool,
}

/// Latitude computations for one technology.
#[derive(Debug, Clone)]
pub struct LatitudeSolver<'a> {
    pub solver: SignalSolver<'a>,
    pub technology: Technology,
    /// Points of the monotonicity/bracketing grid on [max |t(k)|, a_bar].
    pub grid: usize,
}

impl<'a> LatitudeSolver<'a> {
    pub fn new(solver: SignalSolver<'a>, technology: Technology) -> Self {
        LatitudeSolver {
            solver,
            technology,
            grid: 64,
        }
    }

    fn spec(&self) -> &ModelSpec {
        self.solver.spec
    }

    /// mu_L(a, k) for each k in `ks`, failing if a signal is not an
    /// interior, strictly obeyed, consumed one.
    pub fn beliefs(&self, a: f64, ks: &[i32]) -> Result<Vec<f64>> {
        let fail = |k: i32, reason: &str| Error::Assumption2 {
            a,
            k,
            reason: reason.to_string(),
        };
        match self.technology {
            Technology::Broadcast => {
                let b = self.solver.broadcast(a)?;
                if let Some(p) = b.participation.iter().find(|p| p.status == crate::optimizer::ParticipationStatus::Excluded) {
                    return Err(fail(p.k, "voter excluded"));
                }
                ks.iter()
                    .map(|&k| match segment_failure(&self.solver, self.technology, &b.result, a, k) {
                        Some(r) => Err(fail(k, r)),
                        None => Ok(b.result.mu_l()),
                    })
                    .collect()
            }
            tech => ks
                .iter()
                .map(|&k| {
                    let res = match tech {
                        Technology::Personalized => self.solver.personalized(a, k)?,
                        _ => self.solver.competitive(a, k, self.spec().lambda())?,
                    };
                    match segment_failure(&self.solver, tech, &res, a, k) {
                        Some(r) => Err(fail(k, r)),
                        None => Ok(res.mu_l()),
                    }
                })
                .collect(),
        }
    }

    /// max over a' in [t(min D), t(max D)] of phi, with its argmax.
    pub fn max_susceptibility(&self, a: f64, ks: &[i32], mus: &[f64]) -> (f64, f64) {
        let spec = self.spec();
        let phi = |ap: f64| {
            ks.iter()
                .zip(mus)
                .map(|(&k, mu)| spec.v(-a, ap, k) + mu)
                .fold(f64::INFINITY, f64::min)
        };
        let lo = spec.t(ks[0]);
        let hi = spec.t(*ks.last().expect("nonempty coalition"));
        let (mut best_x, mut best) = golden_max(phi, lo, hi, INNER_TOL);
        for &k in ks {
            let x = spec.t(k);
            let f = phi(x);
            if f > best {
                best = f;
                best_x = x;
            }
        }
        (best, best_x)
    }

    fn phi_at(&self, a: f64, ks: &[i32]) -> Result<(f64, f64)> {
        let mus = self.beliefs(a, ks)?;
        Ok(self.max_susceptibility(a, ks, &mus))
    }

    /// xi(D) by an increasing grid scan for the first attracting policy
    /// followed by bisection.
    pub fn latitude(&self, d: Coalition) -> Result<LatitudeReport> {
        let spec = self.spec();
        let ks = members(d, spec.k_max());
        if ks.is_empty() {
            return Err(Error::Precondition("empty coalition".into()));
        }
        let a_bar = spec.a_bar();
        let floor = ks.iter().map(|&k| spec.t(k).abs()).fold(0.0, f64::max);

        let (lo, hi, saturated) = if self.phi_at(floor, &ks)?.0 > 0.0 {
            if self.phi_at(0.0, &ks)?.0 > 0.0 {
                (0.0, 0.0, false)
            } else {
                (0.0, floor, false)
            }
        } else {
            let grid = linspace(floor, a_bar, self.grid.max(2));
            let mut prev = (floor, self.phi_at(floor, &ks)?);
            let mut bracket = None;
            for &a in &grid[1..] {
                let cur = self.phi_at(a, &ks)?;
                if cur.0 < prev.1 .0 - MONOTONE_TOL {
                    return Err(Error::Assumption5 {
                        a1: prev.0,
                        a2: a,
                        phi1: prev.1 .0,
                        phi2: cur.0,
                        a_prime: cur.1,
                    });
                }
                if cur.0 > 0.0 {
                    bracket = Some((prev.0, a));
                    break;
                }
                prev = (a, cur);
            }
            match bracket {
                Some((l, h)) => (l, h, false),
                None => (a_bar, a_bar, true),
            }
        };

        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > OUTER_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phi_at(mid, &ks)?.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let xi = lo;
        let mus = self.beliefs(xi, &ks)?;
        let (_, dev) = self.max_susceptibility(xi, &ks, &mus);
        let components = self.components(&ks)?;
        Ok(LatitudeReport {
            target: ks.clone(),
            xi,
            binding_deviation: dev,
            belief_at_latitude: ks.into_iter().zip(mus).collect(),
            components,
            saturated,
        })
    }

    /// (-t(k), |mu_L(|t(k)|, k)|) for singletons; for broadcast only the
    /// median, with the belief taken at t(1).
    pub fn components(&self, ks: &[i32]) -> Result<Option<LatitudeComponents>> {
        let spec = self.spec();
        if ks.len() != 1 {
            return Ok(None);
        }
        let k = ks[0];
        let at = match self.technology {
            Technology::Broadcast if k == 0 => spec.t(1),
            Technology::Broadcast => return Ok(None),
            _ => spec.t(k).abs(),
        };
        let mu = self.beliefs(at, &[k])?[0];
        Ok(Some(LatitudeComponents {
            neg_bliss: -spec.t(k),
            belief: mu.abs(),
        }))
    }
}

/// xi(D) with default settings.
pub fn policy_latitude(spec: &ModelSpec, technology: Technology, d: Coalition) -> Result<LatitudeReport> {
    LatitudeSolver::new(SignalSolver::new(spec), technology).latitude(d)
}
