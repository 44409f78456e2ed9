//! Attention-maximizing news signals for rationally inattentive voters,
//! the policy latitudes they induce, and the resulting symmetric
//! equilibria of two-candidate electoral competition.
//!
//! Voter types are indexed `k = -K..=K` and stored at `k + K`.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod model;
mod nnls;
pub mod numeric;
pub mod optimizer;
pub mod signals;
pub mod statics;

pub use error::{Error, Result};
pub use model::{validate_model, AttentionSpec, CostKind, ModelSpec, StateModel, Technology, UtilityKind};
pub use numeric::Tolerances;
pub use optimizer::{
    competitive_signal, optimal_broadcast_signal, optimal_personalized_signal, Regime, SignalSolveResult, SignalSolver,
};
pub use signals::{BinarySignal, Signal};
