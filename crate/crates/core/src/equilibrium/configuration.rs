//! Joint news distributions <chi, b+, b->: which recommendation profiles
//! occur and with what state-conditional probabilities.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Technology;
use crate::nnls::nnls;
use crate::optimizer::SignalSolver;

/// Tolerance for the symmetry condition on numerically derived weights.
pub const SYMMETRY_TOL: f64 = 1e-8;
/// Tolerance of the consistency equations chi b = pi.
pub const CONSISTENCY_TOL: f64 = 1e-10;
/// Lower bound imposed on recovered weights so they stay strictly positive.
pub const WEIGHT_FLOOR: f64 = 1e-10;

/// A news configuration. Column `m` is stored as a bitmask whose bit `i`
/// is the recommendation (1 = endorse R) to the type in row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewsConfiguration {
    n_rows: usize,
    columns: Vec<u32>,
    b_plus: Vec<f64>,
    b_minus: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalKind {
    /// chi*: a common recommendation to all types.
    BroadcastStar,
    /// chi**: conditionally independent recommendations.
    IndependentStarStar,
}

/// Sigma o x = P(1 - x): complement then reverse the rows.
pub fn sigma(col: u32, n_rows: usize) -> u32 {
    let full = (1u32 << n_rows) - 1;
    let c = !col & full;
    (0..n_rows).fold(0, |acc, i| acc | (((c >> i) & 1) << (n_rows - 1 - i)))
}

impl NewsConfiguration {
    pub fn new(n_rows: usize, columns: Vec<u32>, b_plus: Vec<f64>, b_minus: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_rows > 31 {
            return Err(Error::Dimension(format!("{n_rows} rows")));
        }
        let m = columns.len();
        if m == 0 || b_plus.len() != m || b_minus.len() != m {
            return Err(Error::Dimension(format!(
                "{m} columns with {} / {} weights",
                b_plus.len(),
                b_minus.len()
            )));
        }
        if columns.iter().any(|&c| c >> n_rows != 0) {
            return Err(Error::Dimension("column wider than the row count".into()));
        }
        let mut sorted = columns.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != m {
            return Err(Error::Precondition("columns must be pairwise distinct".into()));
        }
        for b in [&b_plus, &b_minus] {
            if b.iter().any(|&x| !(x > 0.0)) || (b.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::Precondition(
                    "weights must be strictly positive and sum to 1".into(),
                ));
            }
        }
        Ok(NewsConfiguration {
            n_rows,
            columns,
            b_plus,
            b_minus,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn b_plus(&self) -> &[f64] {
        &self.b_plus
    }

    pub fn b_minus(&self) -> &[f64] {
        &self.b_minus
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> u8 {
        ((self.columns[col] >> row) & 1) as u8
    }

    /// chi as a row-major 0/1 matrix.
    pub fn chi(&self) -> Vec<Vec<u8>> {
        (0..self.n_rows)
            .map(|i| (0..self.n_cols()).map(|m| self.entry(i, m)).collect())
            .collect()
    }

    /// Every column of `other` is a column of `self`.
    pub fn is_richer_than(&self, other: &NewsConfiguration) -> bool {
        self.n_rows == other.n_rows && other.columns.iter().all(|c| self.columns.contains(c))
    }

    /// Symmetry: each column's mirror image is a column, with matching
    /// weights across states.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.columns.iter().enumerate().all(|(m, &c)| {
            let target = sigma(c, self.n_rows);
            self.columns
                .iter()
                .position(|&x| x == target)
                .is_some_and(|n| (self.b_plus[m] - self.b_minus[n]).abs() <= tol)
        })
    }

    /// Max residuals of chi b+ = pi+ and chi b- = pi-.
    pub fn residuals(&self, pi_plus: &[f64], pi_minus: &[f64]) -> Result<(f64, f64)> {
        if pi_plus.len() != self.n_rows || pi_minus.len() != self.n_rows {
            return Err(Error::Dimension(format!(
                "{} rows against {} marginals",
                self.n_rows,
                pi_plus.len()
            )));
        }
        let res = |b: &[f64], pi: &[f64]| {
            (0..self.n_rows)
                .map(|i| {
                    let s: f64 = (0..self.n_cols()).map(|m| self.entry(i, m) as f64 * b[m]).sum();
                    (s - pi[i]).abs()
                })
                .fold(0.0, f64::max)
        };
        Ok((res(&self.b_plus, pi_plus), res(&self.b_minus, pi_minus)))
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    chi: Vec<Vec<u8>>,
    b_plus: Vec<f64>,
    b_minus: Vec<f64>,
}

impl Serialize for NewsConfiguration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigRepr {
            chi: self.chi(),
            b_plus: self.b_plus.clone(),
            b_minus: self.b_minus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewsConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ConfigRepr::deserialize(d)?;
        let n_rows = r.chi.len();
        let n_cols = r.chi.first().map_or(0, Vec::len);
        if r.chi.iter().any(|row| row.len() != n_cols || row.iter().any(|&x| x > 1)) {
            return Err(serde::de::Error::custom("chi must be a rectangular 0/1 matrix"));
        }
        let columns = (0..n_cols)
            .map(|m| (0..n_rows).fold(0u32, |acc, i| acc | ((r.chi[i][m] as u32) << i)))
            .collect();
        NewsConfiguration::new(n_rows, columns, r.b_plus, r.b_minus).map_err(serde::de::Error::custom)
    }
}

/// Per-type R-endorsement probabilities conditional on omega = +1 and -1.
pub fn conditional_profile(solver: &SignalSolver<'_>, technology: Technology, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let signals = solver.signals(technology, a)?;
    let mut plus = Vec::with_capacity(signals.len());
    let mut minus = Vec::with_capacity(signals.len());
    for (res, k) in signals.iter().zip(solver.spec.types()) {
        let b = res.binary().ok_or_else(|| Error::Assumption2 {
            a,
            k,
            reason: "degenerate signal".into(),
        })?;
        let (p, m) = b.conditionals();
        plus.push(p);
        minus.push(m);
    }
    Ok((plus, minus))
}

/// chi* or chi** built from the optimal signals at `a`. chi* always uses the
/// broadcast signal; chi** uses the per-type signals of `technology`.
pub fn build_canonical_configuration(
    kind: CanonicalKind,
    solver: &SignalSolver<'_>,
    technology: Technology,
    a: f64,
) -> Result<NewsConfiguration> {
    let n = solver.spec.n_types();
    match kind {
        CanonicalKind::BroadcastStar => {
            let b = solver.broadcast(a)?;
            let sig = b.result.binary().ok_or_else(|| Error::Assumption2 {
                a,
                k: 0,
                reason: "degenerate broadcast signal".into(),
            })?;
            let (p, m) = sig.conditionals();
            NewsConfiguration::new(n, vec![0, (1 << n) - 1], vec![1.0 - p, p], vec![1.0 - m, m])
        }
        CanonicalKind::IndependentStarStar => {
            let (plus, minus) = conditional_profile(solver, technology, a)?;
            let columns: Vec<u32> = (0..1u32 << n).collect();
            let weight = |pi: &[f64], c: u32| {
                (0..n)
                    .map(|i| if (c >> i) & 1 == 1 { pi[i] } else { 1.0 - pi[i] })
                    .product::<f64>()
            };
            let bp = columns.iter().map(|&c| weight(&plus, c)).collect();
            let bm = columns.iter().map(|&c| weight(&minus, c)).collect();
            NewsConfiguration::new(n, columns, bp, bm)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

/// Whether the joint distribution reproduces the technology's marginals at `a`.
pub fn check_consistency(
    config: &NewsConfiguration,
    solver: &SignalSolver<'_>,
    technology: Technology,
    a: f64,
) -> Result<ConsistencyReport> {
    if config.n_rows() != solver.spec.n_types() {
        return Err(Error::Dimension(format!(
            "configuration has {} rows for {} types",
            config.n_rows(),
            solver.spec.n_types()
        )));
    }
    let (plus, minus) = conditional_profile(solver, technology, a)?;
    let (rp, rm) = config.residuals(&plus, &minus)?;
    Ok(ConsistencyReport {
        consistent: rp <= CONSISTENCY_TOL && rm <= CONSISTENCY_TOL,
        residual_plus: rp,
        residual_minus: rm,
    })
}

/// Strictly positive weights b with chi b = pi and sum(b) = 1, found by
/// nonnegative least squares on b - floor. Returns the weights and the max
/// residual of the equations.
pub fn solve_weights(n_rows: usize, columns: &[u32], pi: &[f64]) -> (Vec<f64>, f64) {
    let m = columns.len();
    let eps = WEIGHT_FLOOR;
    let mut a = DMatrix::zeros(n_rows + 1, m);
    let mut rhs = DVector::zeros(n_rows + 1);
    for i in 0..n_rows {
        let mut row_sum = 0.0;
        for (j, &c) in columns.iter().enumerate() {
            let e = ((c >> i) & 1) as f64;
            a[(i, j)] = e;
            row_sum += e;
        }
        rhs[i] = pi[i] - eps * row_sum;
    }
    for j in 0..m {
        a[(n_rows, j)] = 1.0;
    }
    rhs[n_rows] = 1.0 - eps * m as f64;
    let y = nnls(&a, &rhs);
    let b: Vec<f64> = y.iter().map(|v| v + eps).collect();
    let mut resid = (b.iter().sum::<f64>() - 1.0).abs();
    for i in 0..n_rows {
        let s: f64 = columns
            .iter()
            .zip(&b)
            .map(|(&c, w)| ((c >> i) & 1) as f64 * w)
            .sum();
        resid = resid.max((s - pi[i]).abs());
    }
    (b, resid)
}

/// Configuration-level consistency: for each `a` in `grid` there are
/// weights reproducing the marginals. Returns the worst residual.
pub fn consistency_over_grid(
    n_rows: usize,
    columns: &[u32],
    solver: &SignalSolver<'_>,
    technology: Technology,
    grid: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &a in grid {
        let (plus, minus) = conditional_profile(solver, technology, a)?;
        let (_, rp) = solve_weights(n_rows, columns, &plus);
        let (_, rm) = solve_weights(n_rows, columns, &minus);
        worst = worst.max(rp).max(rm);
    }
    Ok(worst)
}

/// Mirror-image orbits {x, Sigma o x} of all profiles, excluding the
/// unanimous pair.
pub fn profile_orbits(n_rows: usize) -> Vec<(u32, u32)> {
    let full = (1u32 << n_rows) - 1;
    (1..full)
        .filter_map(|c| {
            let s = sigma(c, n_rows);
            (c < s).then_some((c, s))
        })
        .collect()
}

/// A random symmetric configuration obtained by deleting mirror orbits of
/// chi**, with weights re-solved at `a_ref` and consistency verified on
/// `grid`. `None` when the draw cannot be made consistent within 1e-8.
pub fn random_consistent_configuration<R: Rng>(
    solver: &SignalSolver<'_>,
    technology: Technology,
    a_ref: f64,
    grid: &[f64],
    rng: &mut R,
) -> Result<Option<NewsConfiguration>> {
    let n = solver.spec.n_types();
    let full = (1u32 << n) - 1;
    let mut columns = vec![0, full];
    for (c, s) in profile_orbits(n) {
        if rng.gen_bool(0.5) {
            columns.push(c);
            columns.push(s);
        }
    }
    columns.sort_unstable();
    if consistency_over_grid(n, &columns, solver, technology, grid)? > 1e-8 {
        return Ok(None);
    }
    let (plus, minus) = conditional_profile(solver, technology, a_ref)?;
    let (bp, rp) = solve_weights(n, &columns, &plus);
    if rp > 1e-8 {
        return Ok(None);
    }
    // Mirror the weights so the draw is symmetric by construction.
    let bm: Vec<f64> = columns
        .iter()
        .map(|&c| {
            let src = sigma(c, n);
            bp[columns.iter().position(|&x| x == src).expect("orbits are closed")]
        })
        .collect();
    let norm = |v: Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    let config = NewsConfiguration::new(n, columns, norm(bp), norm(bm))?;
    let (rp, rm) = config.residuals(&plus, &minus)?;
    Ok((rp <= 1e-8 && rm <= 1e-8).then_some(config))
}
