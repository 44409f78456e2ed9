//! Susceptibilities, policy latitudes, influential coalitions and the
//! symmetric equilibrium policy set.

pub mod configuration;
pub mod influence;
pub mod latitude;
pub mod set;

pub use configuration::{
    build_canonical_configuration, check_consistency, CanonicalKind, ConsistencyReport, NewsConfiguration,
    SYMMETRY_TOL,
};
pub use influence::{coalition_of, enumerate_influential, is_influential, members, Coalition};
pub use latitude::{policy_latitude, repels, susceptibility, LatitudeReport, LatitudeSolver};
pub use set::{brute_force_equilibrium, equilibrium_set, BruteForceResult, EquilibriumOptions, EquilibriumSet};
