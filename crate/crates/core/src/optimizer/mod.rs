//! Optimal news signals: the attention-maximizing monopolist serving one
//! segment (personalized) or all voters at once (broadcast), and the
//! competitive infomediary maximizing the voter's own net utility.

mod broadcast;
mod competitive;
mod personalized;
mod report;

use serde::Serialize;

use crate::error::Result;
use crate::model::{ModelSpec, Technology};
use crate::numeric::Tolerances;
use crate::signals::{BinarySignal, Signal};

pub use broadcast::{BroadcastSolution, ParticipationStatus, TypeParticipation};
pub use competitive::competitive_for_value;
pub use personalized::personalized_for_value;
pub(crate) use report::segment_failure;
pub use report::{assumption2_check, policy_failures, skewness_report, Assumption2Failure, Assumption2Report, Check, SkewnessReport};

/// Posteriors within this distance of +/-1 count as boundary solutions.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// How the optimum was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Full disclosure satisfies participation; the constraint is slack.
    FullDisclosure,
    /// Participation binds: V = lambda * I.
    BindingParticipation,
    /// No informative signal is consumed.
    Degenerate,
    /// Interior optimum of V - lambda~ I (competitive infomediary).
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalSolveResult {
    pub signal: Signal,
    pub regime: Regime,
    /// lambda~ of the equivalent competitive problem. `None` for full
    /// disclosure, degenerate solves and broadcast signals.
    pub effective_cost: Option<f64>,
    pub attention: f64,
    pub value: f64,
    /// V - lambda * I, with the model's lambda (lambda~ for competitive solves).
    pub slack: f64,
    /// Some posterior is pinned at +/-1.
    pub boundary: bool,
    /// The participation residual moved monotonically along the bisection.
    pub path_monotone: bool,
}

impl SignalSolveResult {
    pub(crate) fn degenerate(effective_cost: Option<f64>) -> Self {
        SignalSolveResult {
            signal: Signal::Null,
            regime: Regime::Degenerate,
            effective_cost,
            attention: 0.0,
            value: 0.0,
            slack: 0.0,
            boundary: false,
            path_monotone: true,
        }
    }

    pub fn binary(&self) -> Option<&BinarySignal> {
        self.signal.binary()
    }

    /// Posterior after an L endorsement; NaN for the null signal.
    pub fn mu_l(&self) -> f64 {
        self.binary().map_or(f64::NAN, |b| b.mu_l())
    }

    pub fn mu_r(&self) -> f64 {
        self.binary().map_or(f64::NAN, |b| b.mu_r())
    }

    /// Swap and negate posteriors; used to serve the mirror-image voter.
    pub(crate) fn mirrored(mut self) -> Self {
        if let Signal::Binary(b) = self.signal {
            self.signal = Signal::Binary(b.mirror());
        }
        self
    }
}

/// Solver bound to one environment and tolerance set.
#[derive(Debug, Clone)]
pub struct SignalSolver<'a> {
    pub spec: &'a ModelSpec,
    pub tol: Tolerances,
}

impl<'a> SignalSolver<'a> {
    pub fn new(spec: &'a ModelSpec) -> Self {
        SignalSolver {
            spec,
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(spec: &'a ModelSpec, tol: Tolerances) -> Self {
        SignalSolver { spec, tol }
    }

    /// max V - cost * I for type k at <-a, a>.
    pub fn competitive(&self, a: f64, k: i32, cost: f64) -> Result<SignalSolveResult> {
        self.spec.check_policy(a)?;
        competitive_for_value(self.spec.v_sym(a, k), cost, self.spec.cost(), &self.tol)
    }

    /// max I subject to V >= lambda * I for type k at <-a, a>.
    pub fn personalized(&self, a: f64, k: i32) -> Result<SignalSolveResult> {
        self.spec.check_policy(a)?;
        personalized_for_value(self.spec.v_sym(a, k), self.spec.lambda(), self.spec.cost(), &self.tol)
    }

    /// The single attention-maximizing signal offered to every type.
    pub fn broadcast(&self, a: f64) -> Result<BroadcastSolution> {
        self.spec.check_policy(a)?;
        broadcast::solve(self.spec, a, &self.tol)
    }

    /// Per-type signals under a technology, ordered -K..=K. Broadcast
    /// repeats the common signal.
    pub fn signals(&self, technology: Technology, a: f64) -> Result<Vec<SignalSolveResult>> {
        match technology {
            Technology::Broadcast => {
                let b = self.broadcast(a)?;
                Ok(vec![b.result; self.spec.n_types()])
            }
            Technology::Personalized => self.spec.types().map(|k| self.personalized(a, k)).collect(),
            Technology::Competitive => self
                .spec
                .types()
                .map(|k| self.competitive(a, k, self.spec.lambda()))
                .collect(),
        }
    }
}

/// Competitive signal with default tolerances.
pub fn competitive_signal(spec: &ModelSpec, a: f64, k: i32, cost: f64) -> Result<SignalSolveResult> {
    SignalSolver::new(spec).competitive(a, k, cost)
}

/// Personalized signal with default tolerances.
pub fn optimal_personalized_signal(spec: &ModelSpec, a: f64, k: i32) -> Result<SignalSolveResult> {
    SignalSolver::new(spec).personalized(a, k)
}

/// Broadcast signal with default tolerances.
pub fn optimal_broadcast_signal(spec: &ModelSpec, a: f64) -> Result<BroadcastSolution> {
    SignalSolver::new(spec).broadcast(a)
}
