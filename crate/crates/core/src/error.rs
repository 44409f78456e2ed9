use thiserror::Error;

/// Errors raised by the solvers. Every variant carries enough data to be
/// reported as a machine-readable diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("policy {value} outside [-{a_bar}, {a_bar}]")]
    PolicyOutOfRange { value: f64, a_bar: f64 },

    #[error("numeric failure in {stage}: residual {residual:e} after {iterations} iterations")]
    NumericFailure {
        stage: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("uniform strict obedience violated at a={a}, k={k}: {reason}")]
    Assumption2 { a: f64, k: i32, reason: String },

    #[error("latitude objective not increasing: phi({a1})={phi1} > phi({a2})={phi2} (deviation {a_prime})")]
    Assumption5 {
        a1: f64,
        a2: f64,
        phi1: f64,
        phi2: f64,
        a_prime: f64,
    },

    #[error("column {column} has mass exactly 1/2 ({mass}); rounding is undefined")]
    HalfTie { column: usize, mass: f64 },

    #[error("{types} voter types exceed the enumeration limit of {limit}")]
    SizeGuard { types: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Short machine-readable tag used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid_spec",
            Error::PolicyOutOfRange { .. } => "policy_out_of_range",
            Error::NumericFailure { .. } => "numeric_failure",
            Error::Assumption2 { .. } => "assumption2",
            Error::Assumption5 { .. } => "assumption5",
            Error::HalfTie { .. } => "half_tie",
            Error::SizeGuard { .. } => "size_guard",
            Error::Dimension(_) => "dimension",
            Error::Precondition(_) => "precondition",
        }
    }

    /// True for violations of the modeling assumptions, as opposed to bad
    /// input or numerical trouble.
    pub fn is_assumption(&self) -> bool {
        matches!(self, Error::Assumption2 { .. } | Error::Assumption5 { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
