//! Comparative statics: technology, marginal cost, mass polarization,
//! configuration richness and competitive-versus-monopoly comparisons.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::conditions::{evaluate_with, ConditionEvaluation, CONDITION_GRID};
use crate::equilibrium::configuration::random_consistent_configuration;
use crate::equilibrium::influence::influence_table;
use crate::equilibrium::{
    build_canonical_configuration, coalition_of, equilibrium_set, policy_latitude, CanonicalKind, EquilibriumOptions,
    EquilibriumSet, NewsConfiguration,
};
use crate::error::{Error, Result};
use crate::model::{CostKind, ModelSpec, Technology};
use crate::numeric::linspace;
use crate::optimizer::{assumption2_check, SignalSolver};

/// Slack used when comparing computed equilibrium policies.
pub const ORDER_TOL: f64 = 1e-9;

/// Fails with the first uniform strict obedience violation of `technology`.
pub fn require_assumption2(solver: &SignalSolver<'_>, technology: Technology) -> Result<()> {
    match assumption2_check(solver, technology, CONDITION_GRID)?.failures.into_iter().next() {
        Some(f) => Err(Error::Assumption2 {
            a: f.a,
            k: f.k,
            reason: f.reason,
        }),
        None => Ok(()),
    }
}

/// Policy at which canonical configurations are built. Only the columns
/// matter for influence; weights are re-verified over [0, a*].
pub fn reference_policy(spec: &ModelSpec) -> f64 {
    0.5 * spec.a_bar().min(1.0)
}

fn canonical_kind(technology: Technology) -> CanonicalKind {
    match technology {
        Technology::Broadcast => CanonicalKind::BroadcastStar,
        _ => CanonicalKind::IndependentStarStar,
    }
}

/// Equilibrium set of `technology` under its canonical configuration
/// (chi* for broadcast, chi** otherwise) and populations `q`.
pub fn canonical_equilibrium(solver: &SignalSolver<'_>, technology: Technology, q: &[f64]) -> Result<EquilibriumSet> {
    let spec = solver.spec.with_populations(q.to_vec())?;
    let s = SignalSolver::with_tolerances(&spec, solver.tol);
    let chi = build_canonical_configuration(canonical_kind(technology), &s, technology, reference_policy(&spec))?;
    equilibrium_set(&s, technology, &chi, q, EquilibriumOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increase,
    Decrease,
    Equal,
}

impl Direction {
    fn of(before: f64, after: f64) -> Self {
        if after > before + ORDER_TOL {
            Direction::Increase
        } else if after < before - ORDER_TOL {
            Direction::Decrease
        } else {
            Direction::Equal
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersonalizationComparison {
    pub a_b: f64,
    pub a_p: f64,
    /// Effect of moving from broadcast to personalized news.
    pub direction: Direction,
    /// Present for three-type models.
    pub conditions: Option<ConditionEvaluation>,
    pub broadcast: EquilibriumSet,
    pub personalized: EquilibriumSet,
}

/// a^{b,q} under chi* against a^{p,q} under chi**.
pub fn compare_personalization(solver: &SignalSolver<'_>) -> Result<PersonalizationComparison> {
    let spec = solver.spec;
    require_assumption2(solver, Technology::Broadcast)?;
    require_assumption2(solver, Technology::Personalized)?;
    let q = spec.populations();
    let broadcast = canonical_equilibrium(solver, Technology::Broadcast, q)?;
    let personalized = canonical_equilibrium(solver, Technology::Personalized, q)?;
    let conditions = if spec.k_max() == 1 {
        Some(evaluate_with(solver, false)?)
    } else {
        None
    };
    Ok(PersonalizationComparison {
        a_b: broadcast.a_star,
        a_p: personalized.a_star,
        direction: Direction::of(broadcast.a_star, personalized.a_star),
        conditions,
        broadcast,
        personalized,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub a_b: Option<f64>,
    pub a_p: Option<f64>,
    pub error_b: Option<String>,
    pub error_p: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSweep {
    pub points: Vec<SweepPoint>,
    /// a* strictly decreasing over the evaluable points.
    pub broadcast_decreasing: bool,
    pub personalized_decreasing: bool,
}

fn strictly_decreasing(values: impl Iterator<Item = Option<f64>>) -> bool {
    let v: Vec<f64> = values.flatten().collect();
    v.windows(2).all(|w| w[1] < w[0])
}

fn sweep_one(solver: &SignalSolver<'_>, technology: Technology) -> (Option<f64>, Option<String>) {
    let run = || -> Result<f64> {
        require_assumption2(solver, technology)?;
        Ok(canonical_equilibrium(solver, technology, solver.spec.populations())?.a_star)
    };
    match run() {
        Ok(a) => (Some(a), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

/// a* for both technologies along an increasing ladder of marginal costs.
pub fn lambda_sweep(solver: &SignalSolver<'_>, lambdas: &[f64]) -> Result<LambdaSweep> {
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("lambda ladder must be strictly increasing".into()));
    }
    let points: Vec<SweepPoint> = lambdas
        .iter()
        .map(|&lambda| {
            let spec = solver.spec.with_lambda(lambda)?;
            let s = SignalSolver::with_tolerances(&spec, solver.tol);
            let (a_b, error_b) = sweep_one(&s, Technology::Broadcast);
            let (a_p, error_p) = sweep_one(&s, Technology::Personalized);
            Ok(SweepPoint {
                lambda,
                a_b,
                a_p,
                error_b,
                error_p,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LambdaSweep {
        broadcast_decreasing: strictly_decreasing(points.iter().map(|p| p.a_b)),
        personalized_decreasing: strictly_decreasing(points.iter().map(|p| p.a_p)),
        points,
    })
}

/// True iff q second-order stochastically dominates q': every upper tail
/// sum of q is at most that of q'.
pub fn sosd_compare(q: &[f64], q_prime: &[f64]) -> Result<bool> {
    if q.len() != q_prime.len() || q.len() % 2 == 0 {
        return Err(Error::Dimension(format!(
            "population functions of lengths {} and {}",
            q.len(),
            q_prime.len()
        )));
    }
    let k_max = q.len() / 2;
    let mut tail = 0.0;
    let mut tail_prime = 0.0;
    for i in (k_max + 1..q.len()).rev() {
        tail += q[i];
        tail_prime += q_prime[i];
        if tail > tail_prime + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassPolarization {
    pub a_q: f64,
    pub a_q_prime: f64,
    /// a^{p,chi,q} >= a^{p,chi,q'}.
    pub holds: bool,
    pub strict: bool,
    /// Three-type models only: whether the strict ordering is predicted.
    pub predicted_strict: Option<bool>,
}

/// Personalized a* under `chi` for q and the less dominant q'.
pub fn mass_polarization_effect(
    solver: &SignalSolver<'_>,
    chi: &NewsConfiguration,
    q: &[f64],
    q_prime: &[f64],
) -> Result<MassPolarization> {
    let spec = solver.spec;
    if !sosd_compare(q, q_prime)? {
        return Err(Error::Precondition("q does not dominate q'".into()));
    }
    if spec.k_max() > 1 && spec.cost() != CostKind::Quadratic {
        return Err(Error::Precondition("general mass-polarization ordering needs quadratic cost".into()));
    }
    let run = |pop: &[f64]| -> Result<f64> {
        let s = spec.with_populations(pop.to_vec())?;
        let solver = SignalSolver::with_tolerances(&s, solver.tol);
        Ok(equilibrium_set(&solver, Technology::Personalized, chi, pop, EquilibriumOptions::default())?.a_star)
    };
    let a_q = run(q)?;
    let a_q_prime = run(q_prime)?;
    let predicted_strict = if spec.k_max() == 1 {
        let xi = |k: i32| -> Result<f64> {
            Ok(policy_latitude(spec, Technology::Personalized, coalition_of(&[k], 1))?.xi)
        };
        let extremes = xi(-1)?.min(xi(1)?);
        Some(q[1] > 0.5 && q_prime[1] <= 0.5 && extremes < xi(0)? - ORDER_TOL)
    } else {
        None
    };
    Ok(MassPolarization {
        a_q,
        a_q_prime,
        holds: a_q >= a_q_prime - ORDER_TOL,
        strict: a_q > a_q_prime + ORDER_TOL,
        predicted_strict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetitiveComparison {
    pub a_c: f64,
    pub a_p: f64,
    /// a^c < a^p.
    pub holds: bool,
    /// Single-type latitudes (k, xi^c, xi^p).
    pub latitudes: Vec<(i32, f64, f64)>,
}

/// Competitive equilibrium under `chi_c` against personalized monopoly
/// news under the coarser `chi_p`.
pub fn competitive_comparison(
    solver: &SignalSolver<'_>,
    chi_c: &NewsConfiguration,
    chi_p: &NewsConfiguration,
) -> Result<CompetitiveComparison> {
    let spec = solver.spec;
    if !chi_c.is_richer_than(chi_p) {
        return Err(Error::Precondition("competitive configuration is not richer".into()));
    }
    require_assumption2(solver, Technology::Competitive)?;
    let q = spec.populations();
    let opts = EquilibriumOptions::default();
    let a_c = equilibrium_set(solver, Technology::Competitive, chi_c, q, opts)?.a_star;
    let a_p = equilibrium_set(solver, Technology::Personalized, chi_p, q, opts)?.a_star;
    let latitudes = spec
        .types()
        .map(|k| {
            let c = coalition_of(&[k], spec.k_max());
            Ok((
                k,
                policy_latitude(spec, Technology::Competitive, c)?.xi,
                policy_latitude(spec, Technology::Personalized, c)?.xi,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(CompetitiveComparison {
        a_c,
        a_p,
        holds: a_c < a_p,
        latitudes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichnessDraw {
    pub columns: Vec<u32>,
    pub a_star: f64,
    /// a^{p,chi**,q} <= a^{p,chi,q}.
    pub chain_holds: bool,
    /// Every coalition influential under chi* is influential under chi.
    pub broadcast_subset_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichnessRow {
    pub q: Vec<f64>,
    pub a_star_star: f64,
    /// a^{p,chi**,uniform} <= a^{p,chi**,q}.
    pub uniform_bound_holds: bool,
    pub draws: Vec<RichnessDraw>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichnessChain {
    pub min_xi: f64,
    pub a_uniform: f64,
    /// min_k xi^p(k) = a^{p,chi**,uniform}.
    pub minimum_matches: bool,
    pub rows: Vec<RichnessRow>,
    /// Draws discarded because no consistent weights existed.
    pub rejected: usize,
}

impl RichnessChain {
    pub fn violations(&self) -> usize {
        let mut n = usize::from(!self.minimum_matches);
        for r in &self.rows {
            n += usize::from(!r.uniform_bound_holds);
            n += r.draws.iter().filter(|d| !d.chain_holds || !d.broadcast_subset_holds).count();
        }
        n
    }
}

/// Checks min_k xi^p(k) = a^{p,chi**,uniform} <= a^{p,chi**,q} <= a^{p,chi,q}
/// for seeded random consistent chi, and that influence under chi* implies
/// influence under each chi.
pub fn richness_chain(solver: &SignalSolver<'_>, populations: &[Vec<f64>], draws: usize, seed: u64) -> Result<RichnessChain> {
    let spec = solver.spec;
    let n = spec.n_types();
    let k_max = spec.k_max();
    let uniform = vec![1.0 / n as f64; n];
    let min_xi = spec
        .types()
        .map(|k| Ok(policy_latitude(spec, Technology::Personalized, coalition_of(&[k], k_max))?.xi))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let a_uniform = canonical_equilibrium(solver, Technology::Personalized, &uniform)?.a_star;
    let full = (1u32 << n) - 1;
    let chi_star = NewsConfiguration::new(n, vec![0, full], vec![0.5, 0.5], vec![0.5, 0.5])?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = linspace(0.0, spec.a_bar(), 5);
    let a_ref = reference_policy(spec);
    let mut rejected = 0;
    let mut configs = Vec::with_capacity(draws);
    let max_attempts = 50 * draws.max(1);
    for _ in 0..max_attempts {
        if configs.len() == draws {
            break;
        }
        match random_consistent_configuration(solver, Technology::Personalized, a_ref, &grid, &mut rng)? {
            Some(c) => configs.push(c),
            None => rejected += 1,
        }
    }

    let mut rows = Vec::with_capacity(populations.len());
    for q in populations {
        let s = spec.with_populations(q.clone())?;
        let sq = SignalSolver::with_tolerances(&s, solver.tol);
        let a_star_star = canonical_equilibrium(solver, Technology::Personalized, q)?.a_star;
        let star_table = influence_table(&chi_star, q)?;
        let mut row_draws = Vec::with_capacity(configs.len());
        for chi in &configs {
            let a = equilibrium_set(&sq, Technology::Personalized, chi, q, EquilibriumOptions::default())?.a_star;
            let table = influence_table(chi, q)?;
            row_draws.push(RichnessDraw {
                columns: chi.columns().to_vec(),
                a_star: a,
                chain_holds: a_star_star <= a + ORDER_TOL,
                broadcast_subset_holds: star_table.iter().zip(&table).all(|(&s, &t)| !s || t),
            });
        }
        rows.push(RichnessRow {
            q: q.clone(),
            a_star_star,
            uniform_bound_holds: a_uniform <= a_star_star + ORDER_TOL,
            draws: row_draws,
        });
    }
    Ok(RichnessChain {
        min_xi,
        a_uniform,
        minimum_matches: (min_xi - a_uniform).abs() <= ORDER_TOL,
        rows,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UtilityKind;

    fn worked() -> ModelSpec {
        ModelSpec::baseline(0.05, UtilityKind::Distance, 10.0, CostKind::Quadratic, 0.6).unwrap()
    }

    #[test]
    fn personalization_lowers_polarization() {
        let s = worked();
        let r = compare_personalization(&SignalSolver::new(&s)).unwrap();
        assert!((r.a_b - 0.717129).abs() < 1e-6);
        assert!((r.a_p - 0.683333).abs() < 1e-6);
        assert_eq!(r.direction, Direction::Decrease);
        assert!(!r.conditions.unwrap().doublestar.unwrap().holds);
    }

    #[test]
    fn personalization_raises_with_median_majority() {
        let s = worked().with_populations(vec![0.2, 0.6, 0.2]).unwrap();
        let r = compare_personalization(&SignalSolver::new(&s)).unwrap();
        assert!((r.a_p - 0.833333).abs() < 1e-6);
        assert_eq!(r.direction, Direction::Increase);
    }

    #[test]
    fn sweep_decreases() {
        let s = worked();
        let r = lambda_sweep(&SignalSolver::new(&s), &[0.55, 0.6, 0.7, 0.9]).unwrap();
        assert!(r.broadcast_decreasing && r.personalized_decreasing);
        assert!(r.points.iter().all(|p| p.error_b.is_none() && p.error_p.is_none()));
        let single = lambda_sweep(&SignalSolver::new(&s), &[0.6]).unwrap();
        assert!(single.personalized_decreasing);
    }

    #[test]
    fn sweep_records_failures() {
        let s = worked();
        let r = lambda_sweep(&SignalSolver::new(&s), &[0.4, 0.6]).unwrap();
        assert!(r.points[0].a_p.is_none() && r.points[0].error_p.is_some());
        assert!(r.points[1].a_p.is_some());
    }

    #[test]
    fn sosd() {
        let u = [1.0 / 3.0; 3];
        assert!(sosd_compare(&[0.2, 0.6, 0.2], &u).unwrap());
        assert!(sosd_compare(&u, &u).unwrap());
        assert!(!sosd_compare(&u, &[0.2, 0.6, 0.2]).unwrap());
        assert!(sosd_compare(&u, &[0.2; 5]).is_err());
    }

    #[test]
    fn mass_polarization() {
        let s = worked();
        let solver = SignalSolver::new(&s);
        let chi = build_canonical_configuration(CanonicalKind::IndependentStarStar, &solver, Technology::Personalized, 0.2)
            .unwrap();
        let r = mass_polarization_effect(&solver, &chi, &[0.2, 0.6, 0.2], &[1.0 / 3.0; 3]).unwrap();
        assert!((r.a_q - 0.833333).abs() < 1e-6 && (r.a_q_prime - 0.683333).abs() < 1e-6);
        assert!(r.strict && r.predicted_strict == Some(true));
        let r = mass_polarization_effect(&solver, &chi, &[0.3, 0.4, 0.3], &[0.35, 0.3, 0.35]).unwrap();
        assert!(!r.strict && r.holds && r.predicted_strict == Some(false));
        assert!(mass_polarization_effect(&solver, &chi, &[1.0 / 3.0; 3], &[0.2, 0.6, 0.2]).is_err());
    }

    #[test]
    fn competitive_below_monopoly() {
        let s = worked();
        let solver = SignalSolver::new(&s);
        let chi = build_canonical_configuration(CanonicalKind::IndependentStarStar, &solver, Technology::Personalized, 0.2)
            .unwrap();
        let r = competitive_comparison(&solver, &chi, &chi).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.a_p - 0.683333).abs() < 1e-6);
        for (_, c, p) in &r.latitudes {
            assert!(c < p);
        }
        let star = NewsConfiguration::new(3, vec![0, 7], vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        assert!(competitive_comparison(&solver, &star, &chi).is_err());
    }

    #[test]
    fn richness() {
        let s = worked();
        let pops = vec![vec![1.0 / 3.0; 3], vec![0.2, 0.6, 0.2], vec![0.3, 0.4, 0.3]];
        let r = richness_chain(&SignalSolver::new(&s), &pops, 4, 7).unwrap();
        assert!((r.min_xi - 0.683333).abs() < 1e-6);
        assert_eq!(r.violations(), 0, "{r:?}");
    }
}
