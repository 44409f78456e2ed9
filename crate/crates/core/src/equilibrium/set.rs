//! The set of symmetric equilibrium policies [0, a*].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::configuration::{consistency_over_grid, NewsConfiguration};
use super::influence::{influence_table, members, minimal_from_table, Coalition};
use super::latitude::{LatitudeReport, LatitudeSolver};
use crate::error::{Error, Result};
use crate::model::Technology;
use crate::numeric::linspace;
use crate::optimizer::SignalSolver;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalitionLatitude {
    pub coalition: Vec<i32>,
    pub xi: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    /// Policy polarization: the largest symmetric equilibrium policy.
    pub a_star: f64,
    pub interval: (f64, f64),
    /// Coalition attaining the minimum latitude.
    pub disciplining: Vec<i32>,
    /// Latitudes of the minimal influential coalitions.
    pub latitudes: Vec<CoalitionLatitude>,
    /// The same value built up type by type from the median outwards.
    pub induction_a_star: f64,
    pub induction_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions {
    pub latitude_grid: usize,
    /// Policies in [0, a*] at which consistency of chi is verified; 0 skips.
    pub consistency_grid: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions {
            latitude_grid: 64,
            consistency_grid: 5,
        }
    }
}

/// a* = min of xi over influential coalitions. Supersets have weakly larger
/// latitudes, so the minimal influential coalitions suffice.
pub fn equilibrium_set(
    solver: &SignalSolver<'_>,
    technology: Technology,
    chi: &NewsConfiguration,
    q: &[f64],
    opts: EquilibriumOptions,
) -> Result<EquilibriumSet> {
    let spec = solver.spec;
    if chi.n_rows() != spec.n_types() {
        return Err(Error::Dimension(format!(
            "configuration has {} rows for {} types",
            chi.n_rows(),
            spec.n_types()
        )));
    }
    let table = influence_table(chi, q)?;
    let minimal = minimal_from_table(&table);
    let lat = LatitudeSolver {
        grid: opts.latitude_grid,
        ..LatitudeSolver::new(solver.clone(), technology)
    };
    let reports: Vec<(Coalition, LatitudeReport)> = minimal
        .par_iter()
        .map(|&c| lat.latitude(c).map(|r| (c, r)))
        .collect::<Result<_>>()?;
    let memo: BTreeMap<Coalition, f64> = reports.iter().map(|(c, r)| (*c, r.xi)).collect();

    let (a_star, disciplining) = reports
        .iter()
        .fold((spec.a_bar(), None), |(best, who), (c, r)| {
            if r.xi < best || who.is_none() && r.xi <= best {
                (r.xi, Some(*c))
            } else {
                (best, who)
            }
        });

    let (induction_a_star, induction_steps) = induction(spec.k_max(), |m| spec.t(m), &minimal, &memo, spec.a_bar());

    if opts.consistency_grid > 0 {
        let grid = linspace(0.0, a_star, opts.consistency_grid);
        let worst = consistency_over_grid(chi.n_rows(), chi.columns(), solver, technology, &grid)?;
        if worst > 1e-8 {
            return Err(Error::Precondition(format!(
                "configuration is not consistent with {technology:?} marginals (residual {worst:e})"
            )));
        }
    }

    Ok(EquilibriumSet {
        a_star,
        interval: (0.0, a_star),
        disciplining: disciplining.map_or_else(Vec::new, |c| members(c, spec.k_max())),
        latitudes: reports
            .into_iter()
            .map(|(c, r)| CoalitionLatitude {
                coalition: members(c, spec.k_max()),
                xi: r.xi,
                saturated: r.saturated,
            })
            .collect(),
        induction_a_star,
        induction_steps,
    })
}

/// Widen the type window {-m..m} until its influential coalitions pin a
/// latitude below the next bliss point t(m+1).
fn induction(
    k_max: usize,
    t: impl Fn(i32) -> f64,
    minimal: &[Coalition],
    memo: &BTreeMap<Coalition, f64>,
    a_bar: f64,
) -> (f64, usize) {
    for m in 0..=k_max {
        let window: Coalition = ((1u32 << (2 * m + 1)) - 1) << (k_max - m);
        let inside = minimal
            .iter()
            .filter(|&&c| c & !window == 0)
            .map(|c| memo[c])
            .fold(f64::INFINITY, f64::min);
        if m == k_max {
            return (inside.min(a_bar), m + 1);
        }
        if inside < t(m as i32 + 1) {
            return (inside, m + 1);
        }
    }
    unreachable!("loop returns at m = K")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfitableDeviation {
    pub a: f64,
    pub a_prime: f64,
    pub attracted: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    /// Largest grid policy in the equilibrium prefix.
    pub a_max: f64,
    pub step: f64,
    pub first_failure: Option<ProfitableDeviation>,
}

/// Scans symmetric profiles a = 0, step, 2 step, ... and deviations
/// a' in [-a, a) on the same grid plus the bliss points. A deviation is
/// profitable when the voters it attracts, among those with bliss points in
/// [-a, a], form an influential coalition.
pub fn brute_force_equilibrium(
    solver: &SignalSolver<'_>,
    technology: Technology,
    chi: &NewsConfiguration,
    q: &[f64],
    step: f64,
) -> Result<BruteForceResult> {
    if !(step > 0.0) {
        return Err(Error::Precondition("grid step must be positive".into()));
    }
    let spec = solver.spec;
    let table = influence_table(chi, q)?;
    let lat = LatitudeSolver::new(solver.clone(), technology);
    let types: Vec<i32> = spec.types().collect();
    let mut last = 0.0;
    let mut i = 0usize;
    loop {
        let a = i as f64 * step;
        if a > spec.a_bar() + 1e-12 {
            break;
        }
        let a = a.min(spec.a_bar());
        let mus = lat.beliefs(a, &types)?;
        let mut deviations: Vec<f64> = (0..)
            .map(|j| -a + j as f64 * step)
            .take_while(|&ap| ap < a - 1e-12 * (1.0 + a))
            .collect();
        deviations.extend(types.iter().map(|&k| spec.t(k)).filter(|&t| t >= -a && t < a));
        for ap in deviations {
            let attracted: Coalition = types
                .iter()
                .zip(&mus)
                .enumerate()
                .filter(|(_, (&k, &mu))| spec.t(k).abs() <= a && spec.v(-a, ap, k) + mu > 0.0)
                .fold(0, |acc, (idx, _)| acc | 1 << idx);
            if attracted != 0 && table[attracted as usize] {
                return Ok(BruteForceResult {
                    a_max: last,
                    step,
                    first_failure: Some(ProfitableDeviation {
                        a,
                        a_prime: ap,
                        attracted: members(attracted, spec.k_max()),
                    }),
                });
            }
        }
        last = a;
        i += 1;
    }
    Ok(BruteForceResult {
        a_max: last,
        step,
        first_failure: None,
    })
}
