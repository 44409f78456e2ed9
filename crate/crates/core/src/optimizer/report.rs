//! Diagnostics over the policy space: uniform strict obedience and the
//! skewness pattern of optimal signals.

use serde::Serialize;

use super::{Regime, SignalSolveResult, SignalSolver};
use crate::error::Result;
use crate::model::Technology;
use crate::numeric::linspace;
use crate::signals::check_strict_obedience;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption2Failure {
    pub a: f64,
    pub k: i32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption2Report {
    pub technology: Technology,
    pub grid: Vec<f64>,
    pub failures: Vec<Assumption2Failure>,
}

impl Assumption2Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reason a single segment solve violates uniform strict obedience.
pub(crate) fn segment_failure(
    solver: &SignalSolver<'_>,
    technology: Technology,
    res: &SignalSolveResult,
    a: f64,
    k: i32,
) -> Option<&'static str> {
    let expected = match technology {
        Technology::Competitive => Regime::Unconstrained,
        _ => Regime::BindingParticipation,
    };
    match res.regime {
        Regime::Degenerate => return Some("no informative signal consumed"),
        Regime::FullDisclosure => return Some("posterior at boundary"),
        r if r != expected => return Some("unexpected regime"),
        _ => {}
    }
    if res.boundary {
        return Some("posterior at boundary");
    }
    let sig = res.binary()?;
    if !check_strict_obedience(sig, solver.spec, a, k) {
        return Some("strict obedience fails");
    }
    None
}

/// Policy grid used by the check: `n` even points on [0, a_bar] plus the
/// bliss-point magnitudes, where Distance-utility signals change shape.
pub fn assumption_grid(solver: &SignalSolver<'_>, n: usize) -> Vec<f64> {
    let spec = solver.spec;
    let mut grid = linspace(0.0, spec.a_bar(), n.max(2));
    grid.extend(spec.bliss().iter().map(|t| t.abs()));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Checks on an `n`-point policy grid that every segment receives an
/// informative, interior, strictly obeyed signal that every voter consumes.
pub fn assumption2_check(solver: &SignalSolver<'_>, technology: Technology, n: usize) -> Result<Assumption2Report> {
    let grid = assumption_grid(solver, n);
    let mut failures = Vec::new();
    for &a in &grid {
        failures.extend(policy_failures(solver, technology, a)?);
    }
    Ok(Assumption2Report {
        technology,
        grid,
        failures,
    })
}

/// Strict obedience violations of the optimal signals at a single policy.
pub fn policy_failures(solver: &SignalSolver<'_>, technology: Technology, a: f64) -> Result<Vec<Assumption2Failure>> {
    let fail = |k: i32, reason: &str| Assumption2Failure {
        a,
        k,
        reason: reason.to_string(),
    };
    let mut failures = Vec::new();
    match technology {
        Technology::Broadcast => {
            let b = solver.broadcast(a)?;
            for p in &b.participation {
                let reason = if b.excludes_voters && p.status == super::ParticipationStatus::Excluded {
                    Some("voter excluded")
                } else {
                    segment_failure(solver, technology, &b.result, a, p.k)
                };
                if let Some(reason) = reason {
                    failures.push(fail(p.k, reason));
                }
            }
        }
        _ => {
            for (res, k) in solver.signals(technology, a)?.iter().zip(solver.spec.types()) {
                if let Some(reason) = segment_failure(solver, technology, res, a, k) {
                    failures.push(fail(k, reason));
                }
            }
        }
    }
    Ok(failures)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewnessReport {
    pub a: f64,
    pub checks: Vec<Check>,
}

impl SkewnessReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

const SYM_TOL: f64 = 1e-9;

/// Checks the symmetry and own-party skew of optimal signals at `a`.
pub fn skewness_report(solver: &SignalSolver<'_>, a: f64) -> Result<SkewnessReport> {
    let spec = solver.spec;
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| checks.push(Check { name, passed, detail });

    let b = solver.broadcast(a)?;
    let bs = b.result.binary().copied();
    match bs {
        Some(s) => push(
            "broadcast symmetric".into(),
            (s.pi_r() - 0.5).abs() < SYM_TOL && (s.mu_l() + s.mu_r()).abs() < SYM_TOL,
            format!("pi_R={} mu=({}, {})", s.pi_r(), s.mu_l(), s.mu_r()),
        ),
        None => push("broadcast symmetric".into(), false, "degenerate broadcast".into()),
    }

    let pers = solver.signals(Technology::Personalized, a)?;
    for (res, k) in pers.iter().zip(spec.types()) {
        let Some(s) = res.binary().copied() else {
            push(format!("personalized k={k} informative"), false, "degenerate".into());
            continue;
        };
        let (pr, l, r) = (s.pi_r(), s.mu_l().abs(), s.mu_r());
        let v = spec.v_sym(a, k);
        let (name, passed) = if v == 0.0 {
            (format!("median k={k} symmetric"), (pr - 0.5).abs() < SYM_TOL && (l - r).abs() < SYM_TOL)
        } else if v < 0.0 {
            (format!("k={k} skewed left"), pr < 0.5 && l < r)
        } else {
            (format!("k={k} skewed right"), pr > 0.5 && l > r)
        };
        push(name, passed, format!("pi_R={pr} |mu_L|={l} mu_R={r}"));

        let mirror = &pers[spec.idx(-k)];
        if let Some(m) = mirror.binary() {
            push(
                format!("mirror k={k}"),
                (m.mu_l().abs() - r).abs() < SYM_TOL,
                format!("|mu_L(-k)|={} mu_R(k)={r}", m.mu_l().abs()),
            );
        }
        push(
            format!("obedience k={k}"),
            check_strict_obedience(&s, spec, a, k),
            format!("v={v}"),
        );
        let bp = (s.pi_l() * s.mu_l() + s.pi_r() * s.mu_r()).abs();
        push(format!("bayes plausible k={k}"), bp < 1e-12, format!("residual {bp:e}"));
        push(
            format!("broadcast attracts less attention than k={k}"),
            b.result.attention < res.attention,
            format!("I_b={} I_p={}", b.result.attention, res.attention),
        );
    }
    if let Some(s) = bs {
        for k in spec.types() {
            push(
                format!("broadcast obedience k={k}"),
                check_strict_obedience(&s, spec, a, k),
                String::new(),
            );
        }
        let bp = (s.pi_l() * s.mu_l() + s.pi_r() * s.mu_r()).abs();
        push("broadcast bayes plausible".into(), bp < 1e-12, format!("residual {bp:e}"));
    }
    Ok(SkewnessReport { a, checks })
}
