//! The electoral environment: voter types, utilities, attention technology.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Voter utility over policies, as a function of the bliss point.
#[derive(Clone, Copy)]
pub enum UtilityKind {
    /// u(a, k) = -|t(k) - a|
    Distance,
    /// u(a, k) = -(t(k) - a)^2
    Quadratic,
    /// Caller-supplied u(t, a). Assumption checks are the caller's job.
    Custom(fn(f64, f64) -> f64),
}

impl UtilityKind {
    #[inline]
    pub fn eval(&self, t: f64, a: f64) -> f64 {
        match self {
            UtilityKind::Distance => -(t - a).abs(),
            UtilityKind::Quadratic => -(t - a) * (t - a),
            UtilityKind::Custom(u) => u(t, a),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UtilityKind::Distance => "distance",
            UtilityKind::Quadratic => "quadratic",
            UtilityKind::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for UtilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for UtilityKind {
    fn eq(&self, other: &Self) -> bool {
        matches!(
            (self, other),
            (UtilityKind::Distance, UtilityKind::Distance)
                | (UtilityKind::Quadratic, UtilityKind::Quadratic)
        )
    }
}

/// Posterior-separable attention cost, I = sum_z pi_z h(mu_z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// h(mu) = mu^2, the reduction in variance.
    Quadratic,
    /// h(mu) = 1 - H2((1 + mu) / 2) in bits, the reduction in entropy.
    Entropy,
}

impl CostKind {
    #[inline]
    pub fn h(self, mu: f64) -> f64 {
        match self {
            CostKind::Quadratic => mu * mu,
            CostKind::Entropy => {
                let m = mu.abs().min(1.0);
                if m == 1.0 {
                    return 1.0;
                }
                let plus = (1.0 + m) * m.ln_1p();
                let minus = (1.0 - m) * (-m).ln_1p();
                ((plus + minus) / (2.0 * std::f64::consts::LN_2)).max(0.0)
            }
        }
    }

    /// h'(mu) on (-1, 1); infinite at the ends for entropy.
    #[inline]
    pub fn h_prime(self, mu: f64) -> f64 {
        match self {
            CostKind::Quadratic => 2.0 * mu,
            CostKind::Entropy => mu.atanh() / std::f64::consts::LN_2,
        }
    }

    /// Inverse of h' restricted to [-1, 1] (clamped for the quadratic cost).
    #[inline]
    pub fn h_prime_inv(self, x: f64) -> f64 {
        match self {
            CostKind::Quadratic => (0.5 * x).clamp(-1.0, 1.0),
            CostKind::Entropy => (x * std::f64::consts::LN_2).tanh(),
        }
    }

    /// h''(mu) on (-1, 1).
    pub fn h_second(self, mu: f64) -> f64 {
        match self {
            CostKind::Quadratic => 2.0,
            CostKind::Entropy => 1.0 / (std::f64::consts::LN_2 * (1.0 - mu * mu)),
        }
    }
}

/// The attention technology of a voter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttentionSpec {
    pub cost_kind: CostKind,
}

impl AttentionSpec {
    pub fn new(cost_kind: CostKind) -> Self {
        AttentionSpec { cost_kind }
    }

    pub fn h(&self, mu: f64) -> f64 {
        self.cost_kind.h(mu)
    }

    pub fn h_prime(&self, mu: f64) -> f64 {
        self.cost_kind.h_prime(mu)
    }

    /// Midpoint convexity on a uniform grid plus h(0) = 0 and evenness.
    pub fn check_shape(&self, n: usize) -> bool {
        if self.h(0.0) != 0.0 {
            return false;
        }
        let step = 2.0 / n as f64;
        (0..n).all(|i| {
            let x = -1.0 + i as f64 * step;
            let y = x + step;
            let even = (self.h(x) - self.h(-x)).abs() < 1e-15;
            let mid = self.h(0.5 * (x + y)) < 0.5 * (self.h(x) + self.h(y));
            even && mid
        })
    }
}

/// The valence state: uniform on {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateModel {
    pub support: [i8; 2],
    pub prior: [f64; 2],
    pub prior_mean: f64,
}

impl Default for StateModel {
    fn default() -> Self {
        StateModel {
            support: [-1, 1],
            prior: [0.5, 0.5],
            prior_mean: 0.0,
        }
    }
}

/// Which regime produces the voters' news signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technology {
    Broadcast,
    Personalized,
    Competitive,
}

/// A validated environment. Arrays are indexed by `k + K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    k_max: usize,
    q: Vec<f64>,
    t: Vec<f64>,
    utility: UtilityKind,
    a_bar: f64,
    cost: CostKind,
    lambda: f64,
}

impl ModelSpec {
    pub fn new(
        k_max: usize,
        q: Vec<f64>,
        t: Vec<f64>,
        utility: UtilityKind,
        a_bar: f64,
        cost: CostKind,
        lambda: f64,
    ) -> Result<Self> {
        let n = 2 * k_max + 1;
        if k_max == 0 {
            return Err(Error::InvalidSpec("K must be positive".into()));
        }
        if q.len() != n || t.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} populations and bliss points, got {} and {}",
                q.len(),
                t.len()
            )));
        }
        if q.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidSpec("populations must be strictly positive".into()));
        }
        if (0..n).any(|i| q[i] != q[n - 1 - i]) {
            return Err(Error::InvalidSpec("populations not symmetric".into()));
        }
        if (q.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec("populations do not sum to 1".into()));
        }
        if (0..n).any(|i| t[i] != -t[n - 1 - i]) {
            return Err(Error::InvalidSpec("bliss not odd-symmetric".into()));
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec("bliss not strictly increasing".into()));
        }
        if !(a_bar > 0.0) || !a_bar.is_finite() {
            return Err(Error::InvalidSpec("a_bar must be positive".into()));
        }
        if t.iter().any(|x| x.abs() >= a_bar) {
            return Err(Error::InvalidSpec("bliss points must lie inside (-a_bar, a_bar)".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidSpec("lambda must be positive".into()));
        }
        Ok(ModelSpec {
            k_max,
            q,
            t,
            utility,
            a_bar,
            cost,
            lambda,
        })
    }

    /// The baseline three-type environment with uniform populations.
    pub fn baseline(t1: f64, utility: UtilityKind, a_bar: f64, cost: CostKind, lambda: f64) -> Result<Self> {
        let third = 1.0 / 3.0;
        ModelSpec::new(1, vec![third; 3], vec![-t1, 0.0, t1], utility, a_bar, cost, lambda)
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Number of voter types, 2K + 1.
    pub fn n_types(&self) -> usize {
        2 * self.k_max + 1
    }

    /// Types ordered -K..=K.
    pub fn types(&self) -> impl Iterator<Item = i32> {
        let k = self.k_max as i32;
        -k..=k
    }

    #[inline]
    pub fn idx(&self, k: i32) -> usize {
        (k + self.k_max as i32) as usize
    }

    #[inline]
    pub fn type_at(&self, i: usize) -> i32 {
        i as i32 - self.k_max as i32
    }

    pub fn q(&self, k: i32) -> f64 {
        self.q[self.idx(k)]
    }

    pub fn t(&self, k: i32) -> f64 {
        self.t[self.idx(k)]
    }

    pub fn populations(&self) -> &[f64] {
        &self.q
    }

    pub fn bliss(&self) -> &[f64] {
        &self.t
    }

    pub fn utility(&self) -> UtilityKind {
        self.utility
    }

    pub fn a_bar(&self) -> f64 {
        self.a_bar
    }

    pub fn cost(&self) -> CostKind {
        self.cost
    }

    pub fn attention(&self) -> AttentionSpec {
        AttentionSpec::new(self.cost)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let mut s = self.clone();
        s.lambda = lambda;
        ModelSpec::new(s.k_max, s.q, s.t, s.utility, s.a_bar, s.cost, s.lambda)
    }

    pub fn with_populations(&self, q: Vec<f64>) -> Result<Self> {
        ModelSpec::new(self.k_max, q, self.t.clone(), self.utility, self.a_bar, self.cost, self.lambda)
    }

    pub fn with_bliss(&self, t: Vec<f64>) -> Result<Self> {
        ModelSpec::new(self.k_max, self.q.clone(), t, self.utility, self.a_bar, self.cost, self.lambda)
    }

    pub fn with_a_bar(&self, a_bar: f64) -> Result<Self> {
        ModelSpec::new(self.k_max, self.q.clone(), self.t.clone(), self.utility, a_bar, self.cost, self.lambda)
    }

    pub fn with_cost(&self, cost: CostKind) -> Result<Self> {
        ModelSpec::new(self.k_max, self.q.clone(), self.t.clone(), self.utility, self.a_bar, cost, self.lambda)
    }

    #[inline]
    pub fn u(&self, a: f64, k: i32) -> f64 {
        self.utility.eval(self.t(k), a)
    }

    /// v(<aL, aR>, k) = u(aR, k) - u(aL, k), without range checks.
    #[inline]
    pub fn v(&self, a_l: f64, a_r: f64, k: i32) -> f64 {
        self.u(a_r, k) - self.u(a_l, k)
    }

    /// v at the symmetric profile <-a, a>.
    #[inline]
    pub fn v_sym(&self, a: f64, k: i32) -> f64 {
        self.v(-a, a, k)
    }

    pub(crate) fn check_policy(&self, a: f64) -> Result<()> {
        if !(a.abs() <= self.a_bar) {
            return Err(Error::PolicyOutOfRange {
                value: a,
                a_bar: self.a_bar,
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(rename = "K")]
    k: usize,
    q: Vec<f64>,
    t: Vec<f64>,
    utility: String,
    a_bar: f64,
    cost: CostKind,
    lambda: f64,
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec {
            k: self.k_max,
            q: self.q.clone(),
            t: self.t.clone(),
            utility: self.utility.name().to_string(),
            a_bar: self.a_bar,
            cost: self.cost,
            lambda: self.lambda,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        let utility = match raw.utility.as_str() {
            "distance" => UtilityKind::Distance,
            "quadratic" => UtilityKind::Quadratic,
            other => {
                return Err(serde::de::Error::custom(format!("unknown utility '{other}'")));
            }
        };
        ModelSpec::new(raw.k, raw.q, raw.t, utility, raw.a_bar, raw.cost, raw.lambda)
            .map_err(serde::de::Error::custom)
    }
}

/// Outcome of one numerically checked clause.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseCheck {
    pub clause: &'static str,
    pub passed: bool,
    /// (a, a', k) at which the clause failed.
    pub witness: Option<(f64, f64, i32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub clauses: Vec<ClauseCheck>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }
}

const GRID: usize = 81;

/// Checks the standing assumptions on utilities on a policy grid.
pub fn validate_model(spec: &ModelSpec) -> ValidationReport {
    let ab = spec.a_bar();
    let grid: Vec<f64> = (0..GRID)
        .map(|i| -ab + 2.0 * ab * i as f64 / (GRID - 1) as f64)
        .collect();
    let types: Vec<i32> = spec.types().collect();
    let scale = 1e-12 * (1.0 + ab * ab);

    let mut continuity = None;
    let mut concavity = None;
    let mut symmetry = None;
    let mut single_peak = None;
    let mut increasing = None;

    for &k in &types {
        let tk = spec.t(k);
        for (i, &a) in grid.iter().enumerate() {
            let eps = 1e-9 * ab;
            if continuity.is_none() && (spec.u(a, k) - spec.u((a + eps).min(ab), k)).abs() > 1e-6 * (1.0 + ab) {
                continuity = Some((a, a + eps, k));
            }
            if symmetry.is_none() && (spec.u(a, k) - spec.u(-a, -k)).abs() > scale {
                symmetry = Some((a, -a, k));
            }
            if let Some(&b) = grid.get(i + 2) {
                let m = grid[i + 1];
                if concavity.is_none() && spec.u(m, k) < 0.5 * (spec.u(a, k) + spec.u(b, k)) - scale {
                    concavity = Some((a, b, k));
                }
            }
            if let Some(&b) = grid.get(i + 1) {
                let wrong = if b <= tk {
                    spec.u(b, k) < spec.u(a, k) - scale
                } else if a >= tk {
                    spec.u(b, k) > spec.u(a, k) + scale
                } else {
                    false
                };
                if single_peak.is_none() && wrong {
                    single_peak = Some((a, b, k));
                }
            }
        }
    }
    // v(a, a', k) weakly increasing in k for a < a', and strictly so at
    // symmetric profiles <-a, a> with a > 0.
    'outer: for (i, &a) in grid.iter().enumerate() {
        for &ap in &grid[i + 1..] {
            for w in types.windows(2) {
                let strict = ap > 0.0 && a == -ap;
                let (lo, hi) = (spec.v(a, ap, w[0]), spec.v(a, ap, w[1]));
                if hi < lo - scale || (strict && hi <= lo) {
                    increasing = Some((a, ap, w[0]));
                    break 'outer;
                }
            }
        }
    }

    let clause = |clause, witness: Option<(f64, f64, i32)>| ClauseCheck {
        clause,
        passed: witness.is_none(),
        witness,
    };
    let mut warnings = Vec::new();
    let vmax = grid
        .iter()
        .flat_map(|&a| types.iter().map(move |&k| (a, k)))
        .map(|(a, k)| spec.v_sym(a.abs(), k).abs())
        .fold(0.0, f64::max);
    if vmax >= 1.0 {
        warnings.push(format!("|v| reaches {vmax} >= 1 on the policy space"));
    }
    ValidationReport {
        clauses: vec![
            clause("continuity", continuity),
            clause("concavity", concavity),
            clause("symmetry", symmetry),
            clause("inverted_v", single_peak),
            clause("increasing_differences", increasing),
        ],
        warnings,
    }
}

/// v(<aL, aR>, k) with range checks on both policies.
pub fn policy_value_diff(spec: &ModelSpec, a_l: f64, a_r: f64, k: i32) -> Result<f64> {
    spec.check_policy(a_l)?;
    spec.check_policy(a_r)?;
    if k.unsigned_abs() as usize > spec.k_max() {
        return Err(Error::InvalidSpec(format!("type {k} out of range")));
    }
    Ok(spec.v(a_l, a_r, k))
}
