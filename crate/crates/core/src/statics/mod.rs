//! Comparative statics and condition region scans.

pub mod compare;
pub mod conditions;
pub mod region;

pub use compare::{
    canonical_equilibrium, compare_personalization, competitive_comparison, lambda_sweep, mass_polarization_effect,
    richness_chain, sosd_compare, CompetitiveComparison, Direction, LambdaSweep, MassPolarization,
    PersonalizationComparison, RichnessChain, SweepPoint,
};
pub use conditions::{evaluate_conditions, Beliefs, ConditionEvaluation, DoubleStar, DoubleStarBranch, Inequality};
pub use region::{region_scan, Axis, Checks, Parameter, RegionCell, RegionGrid};
