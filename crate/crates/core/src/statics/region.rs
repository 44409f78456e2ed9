//! Two-parameter scans of Assumption 2 and Conditions (*), (**).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::conditions::{evaluate_with, ConditionEvaluation};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::numeric::{linspace, Tolerances};
use crate::optimizer::SignalSolver;

/// Scalar model parameters a scan can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Lambda,
    /// Extreme bliss point t(1), with t(-1) = -t(1), t(0) = 0 (K = 1).
    T1,
    ABar,
    /// Median population q(0); the rest is split evenly.
    Q0,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Lambda => "lambda",
            Parameter::T1 => "t1",
            Parameter::ABar => "a_bar",
            Parameter::Q0 => "q0",
        }
    }

    pub fn apply(self, spec: &ModelSpec, value: f64) -> Result<ModelSpec> {
        match self {
            Parameter::Lambda => spec.with_lambda(value),
            Parameter::ABar => spec.with_a_bar(value),
            Parameter::T1 => {
                if spec.k_max() != 1 {
                    return Err(Error::Precondition("t1 axis needs K = 1".into()));
                }
                spec.with_bliss(vec![-value, 0.0, value])
            }
            Parameter::Q0 => {
                let n = spec.n_types();
                let rest = (1.0 - value) / (n - 1) as f64;
                let q = (0..n).map(|i| if i == spec.k_max() { value } else { rest }).collect();
                spec.with_populations(q)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: Parameter,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_points")]
    pub n: usize,
}

/// Default points per axis.
pub const DEFAULT_POINTS: usize = 100;

fn default_points() -> usize {
    DEFAULT_POINTS
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || (self.n > 1 && !(self.lo < self.hi)) {
            return Err(Error::Precondition(format!(
                "axis {} needs n >= 1 and lo < hi",
                self.parameter.name()
            )));
        }
        Ok(())
    }
}

/// Which checks a scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub assumption2: bool,
    pub star: bool,
    pub doublestar: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            assumption2: true,
            star: true,
            doublestar: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell {
    pub x: f64,
    pub y: f64,
    /// `None` when not requested or not evaluable.
    pub assumption2: Option<bool>,
    pub star: Option<bool>,
    pub doublestar: Option<bool>,
    pub evaluation: Option<ConditionEvaluation>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGrid {
    pub x_axis: Axis,
    pub y_axis: Axis,
    /// Row-major in y then x: cell (ix, iy) sits at iy * n_x + ix.
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &RegionCell {
        &self.cells[iy * self.x_axis.n + ix]
    }

    /// CSV with header "x,y,assumption2,star,doublestar"; "na" marks
    /// cells where a check was not evaluated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,assumption2,star,doublestar\n");
        let fmt = |v: Option<bool>| v.map_or("na", |b| if b { "true" } else { "false" });
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.x,
                c.y,
                fmt(c.assumption2),
                fmt(c.star),
                fmt(c.doublestar)
            );
        }
        out
    }
}

fn evaluate_cell(base: &ModelSpec, x: Axis, y: Axis, xv: f64, yv: f64, checks: Checks, tol: Tolerances) -> RegionCell {
    let mut cell = RegionCell {
        x: xv,
        y: yv,
        assumption2: None,
        star: None,
        doublestar: None,
        evaluation: None,
        error: None,
    };
    let spec = match x.parameter.apply(base, xv).and_then(|s| y.parameter.apply(&s, yv)) {
        Ok(s) => s,
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    };
    let solver = SignalSolver::with_tolerances(&spec, tol);
    match evaluate_with(&solver, checks.assumption2) {
        Ok(ev) => {
            if checks.assumption2 {
                cell.assumption2 = Some(ev.assumption2);
            }
            if checks.star {
                cell.star = ev.star.map(|s| s.holds);
            }
            if checks.doublestar {
                cell.doublestar = ev.doublestar.map(|d| d.holds);
            }
            cell.evaluation = Some(ev);
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

/// Evaluates the checks on every cell of the grid in parallel; cells are
/// returned in index order regardless of scheduling.
pub fn region_scan(base: &ModelSpec, x_axis: Axis, y_axis: Axis, checks: Checks, tol: Tolerances) -> Result<RegionGrid> {
    x_axis.validate()?;
    y_axis.validate()?;
    let xs = x_axis.values();
    let ys = y_axis.values();
    let idx: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let cells = idx
        .par_iter()
        .map(|&(xv, yv)| evaluate_cell(base, x_axis, y_axis, xv, yv, checks, tol))
        .collect();
    Ok(RegionGrid { x_axis, y_axis, cells })
}
