//! Conditions (*) and (**) of the baseline three-type model.
//!
//! With upsilon^p_z(k) = mu^p_z(|t(k)|, k) and upsilon^b_L = mu^b_L(t(1)):
//! (*)  |upsilon^p_L(1)| - upsilon^p_R(1) > 2 t(1): opposition voters have
//!      the smaller latitude among extreme types;
//! (**) xi^b(0) < min(xi^p(1), xi^p(-1)): extreme personalized latitudes
//!      exceed the broadcast median latitude.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Technology};
use crate::optimizer::{assumption2_check, SignalSolver};

/// Grid used for the Assumption-2 part of a condition evaluation.
pub const CONDITION_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    fn new(lhs: f64, rhs: f64) -> Self {
        Inequality { holds: lhs > rhs, lhs, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleStarBranch {
    /// xi^b(0) <= t(1).
    Automatic,
    /// (*) fails, so base voters discipline: |upsilon^p_L(1)| - |upsilon^b_L| > t(1).
    Base,
    /// (*) holds, so opposition voters discipline: |t(-1)| > |upsilon^b_L| - |upsilon^p_L(-1)|.
    Opposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleStar {
    pub holds: bool,
    pub branch: DoubleStarBranch,
    pub lhs: f64,
    pub rhs: f64,
    /// xi^b(0) < min(xi^p(1), xi^p(-1)) evaluated from the latitudes directly.
    pub direct: bool,
}

/// Latitudes and beliefs entering the conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beliefs {
    pub upsilon_p_l_plus: f64,
    pub upsilon_p_r_plus: f64,
    pub upsilon_p_l_minus: f64,
    pub upsilon_b_l: f64,
    pub xi_p_minus: f64,
    pub xi_p_zero: f64,
    pub xi_p_plus: f64,
    pub xi_b_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEvaluation {
    pub assumption2: bool,
    pub star: Option<Inequality>,
    pub doublestar: Option<DoubleStar>,
    pub beliefs: Option<Beliefs>,
}

/// Uniform strict obedience for both the broadcast and personalized technologies.
pub fn assumption2_both(solver: &SignalSolver<'_>) -> Result<bool> {
    Ok(assumption2_check(solver, Technology::Personalized, CONDITION_GRID)?.passed()
        && assumption2_check(solver, Technology::Broadcast, CONDITION_GRID)?.passed())
}

/// Beliefs at the bliss points and the implied latitudes (valid when the
/// policy space is large enough for no latitude to saturate).
pub fn beliefs(solver: &SignalSolver<'_>) -> Result<Beliefs> {
    let spec = solver.spec;
    let t1 = spec.t(1);
    let p_plus = solver.personalized(t1, 1)?;
    let p_minus = solver.personalized(t1, -1)?;
    let p_zero = solver.personalized(0.0, 0)?;
    let b = solver.broadcast(t1)?;
    let ub = b.result.mu_l();
    // Below t(1) the broadcast median latitude solves phi = a + mu^b_L(a) = 0.
    let xi_b = if ub.abs() >= t1 {
        ub.abs()
    } else {
        crate::equilibrium::policy_latitude(spec, Technology::Broadcast, crate::equilibrium::coalition_of(&[0], 1))?.xi
    };
    Ok(Beliefs {
        upsilon_p_l_plus: p_plus.mu_l(),
        upsilon_p_r_plus: p_plus.mu_r(),
        upsilon_p_l_minus: p_minus.mu_l(),
        upsilon_b_l: ub,
        xi_p_minus: -spec.t(-1) + p_minus.mu_l().abs(),
        xi_p_zero: p_zero.mu_l().abs(),
        xi_p_plus: -t1 + p_plus.mu_l().abs(),
        xi_b_zero: xi_b,
    })
}

/// Evaluates Assumption 2, (*) and (**) on a three-type model.
pub fn evaluate_conditions(spec: &ModelSpec) -> Result<ConditionEvaluation> {
    evaluate_with(&SignalSolver::new(spec), true)
}

pub(crate) fn evaluate_with(solver: &SignalSolver<'_>, check_a2: bool) -> Result<ConditionEvaluation> {
    let spec = solver.spec;
    if spec.k_max() != 1 {
        return Err(Error::Precondition("conditions (*) and (**) are defined for K = 1".into()));
    }
    let a2 = if check_a2 { assumption2_both(solver)? } else { true };
    if !a2 {
        return Ok(ConditionEvaluation {
            assumption2: false,
            star: None,
            doublestar: None,
            beliefs: None,
        });
    }
    let b = beliefs(solver)?;
    let t1 = spec.t(1);
    let star = Inequality::new(b.upsilon_p_l_plus.abs() - b.upsilon_p_r_plus, 2.0 * t1);
    let direct = b.xi_b_zero < b.xi_p_plus.min(b.xi_p_minus);
    let doublestar = if b.xi_b_zero <= t1 {
        DoubleStar {
            holds: true,
            branch: DoubleStarBranch::Automatic,
            lhs: b.xi_b_zero,
            rhs: t1,
            direct,
        }
    } else if star.holds {
        let i = Inequality::new(spec.t(-1).abs(), b.upsilon_b_l.abs() - b.upsilon_p_l_minus.abs());
        DoubleStar {
            holds: i.holds,
            branch: DoubleStarBranch::Opposition,
            lhs: i.lhs,
            rhs: i.rhs,
            direct,
        }
    } else {
        let i = Inequality::new(b.upsilon_p_l_plus.abs() - b.upsilon_b_l.abs(), t1);
        DoubleStar {
            holds: i.holds,
            branch: DoubleStarBranch::Base,
            lhs: i.lhs,
            rhs: i.rhs,
            direct,
        }
    };
    Ok(ConditionEvaluation {
        assumption2: true,
        star: Some(star),
        doublestar: Some(doublestar),
        beliefs: Some(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostKind, UtilityKind};

    #[test]
    fn worked_conditions() {
        let s = ModelSpec::baseline(0.05, UtilityKind::Distance, 10.0, CostKind::Quadratic, 0.6).unwrap();
        let e = evaluate_conditions(&s).unwrap();
        assert!(e.assumption2);
        let star = e.star.unwrap();
        assert!(star.holds);
        assert!((star.lhs - 0.2).abs() < 1e-8 && (star.rhs - 0.1).abs() < 1e-15);
        let ds = e.doublestar.unwrap();
        assert_eq!(ds.branch, DoubleStarBranch::Opposition);
        assert!(!ds.holds && !ds.direct);
        assert!((ds.rhs - 0.083796).abs() < 1e-6);
    }

    #[test]
    fn other_k_rejected() {
        let s = ModelSpec::new(
            2,
            vec![0.2; 5],
            vec![-0.1, -0.05, 0.0, 0.05, 0.1],
            UtilityKind::Distance,
            10.0,
            CostKind::Quadratic,
            0.6,
        )
        .unwrap();
        assert!(evaluate_conditions(&s).is_err());
    }
}
