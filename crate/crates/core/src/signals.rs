//! Binary signals identified by their posterior means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostKind, ModelSpec};

/// A two-realization signal: posterior mean mu_L < 0 after an L endorsement
/// and mu_R > 0 after an R endorsement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinarySignal {
    #[serde(rename = "mu_L")]
    mu_l: f64,
    #[serde(rename = "mu_R")]
    mu_r: f64,
}

impl BinarySignal {
    pub fn new(mu_l: f64, mu_r: f64) -> Result<Self> {
        if !(-1.0..0.0).contains(&mu_l) || !(mu_r > 0.0 && mu_r <= 1.0) {
            return Err(Error::Precondition(format!(
                "posteriors ({mu_l}, {mu_r}) outside [-1,0) x (0,1]"
            )));
        }
        Ok(BinarySignal { mu_l, mu_r })
    }

    pub fn full_disclosure() -> Self {
        BinarySignal { mu_l: -1.0, mu_r: 1.0 }
    }

    pub fn mu_l(&self) -> f64 {
        self.mu_l
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    pub fn pi_l(&self) -> f64 {
        self.mu_r / (self.mu_r - self.mu_l)
    }

    pub fn pi_r(&self) -> f64 {
        -self.mu_l / (self.mu_r - self.mu_l)
    }

    /// (P(R | omega = +1), P(R | omega = -1)).
    pub fn conditionals(&self) -> (f64, f64) {
        let d = self.mu_r - self.mu_l;
        (
            -self.mu_l * (1.0 + self.mu_r) / d,
            -self.mu_l * (1.0 - self.mu_r) / d,
        )
    }

    /// The signal seen by the mirror-image voter: swap and negate posteriors.
    pub fn mirror(&self) -> Self {
        BinarySignal {
            mu_l: -self.mu_r,
            mu_r: -self.mu_l,
        }
    }

    pub fn is_full_disclosure(&self) -> bool {
        self.mu_l == -1.0 && self.mu_r == 1.0
    }

    /// Some posterior sits at +/-1 (within `tol`).
    pub fn at_boundary(&self, tol: f64) -> bool {
        self.mu_l <= -1.0 + tol || self.mu_r >= 1.0 - tol
    }
}

/// A signal or the uninformative null signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    Null,
    Binary(BinarySignal),
}

impl Signal {
    pub fn binary(&self) -> Option<&BinarySignal> {
        match self {
            Signal::Null => None,
            Signal::Binary(b) => Some(b),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Signal::Null)
    }
}

impl From<BinarySignal> for Signal {
    fn from(b: BinarySignal) -> Self {
        Signal::Binary(b)
    }
}

#[derive(Serialize, Deserialize)]
struct SignalRepr {
    #[serde(rename = "mu_L", skip_serializing_if = "Option::is_none", default)]
    mu_l: Option<f64>,
    #[serde(rename = "mu_R", skip_serializing_if = "Option::is_none", default)]
    mu_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    null: Option<bool>,
}

impl Serialize for Signal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Signal::Null => SignalRepr {
                mu_l: None,
                mu_r: None,
                null: Some(true),
            },
            Signal::Binary(b) => SignalRepr {
                mu_l: Some(b.mu_l),
                mu_r: Some(b.mu_r),
                null: None,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SignalRepr::deserialize(d)?;
        match (r.null, r.mu_l, r.mu_r) {
            (Some(true), None, None) => Ok(Signal::Null),
            (None | Some(false), Some(l), Some(h)) => BinarySignal::new(l, h)
                .map(Signal::Binary)
                .map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("expected {mu_L, mu_R} or {null: true}")),
        }
    }
}

/// (P(R | omega = +1), P(R | omega = -1)) of a signal.
pub fn conditionals(sig: &BinarySignal) -> (f64, f64) {
    sig.conditionals()
}

/// I = pi_L h(mu_L) + pi_R h(mu_R); zero for the null signal.
pub fn attention_cost(sig: &Signal, cost: CostKind) -> f64 {
    match sig {
        Signal::Null => 0.0,
        Signal::Binary(b) => binary_cost(b.mu_l, b.mu_r, cost),
    }
}

#[inline]
pub(crate) fn binary_cost(mu_l: f64, mu_r: f64, cost: CostKind) -> f64 {
    let d = mu_r - mu_l;
    (mu_r * cost.h(mu_l) - mu_l * cost.h(mu_r)) / d
}

/// Expected gain from consuming a signal for a voter with valuation
/// difference `v`: sum_z pi_z max(v + mu_z, 0) - max(v, 0).
#[inline]
pub fn gain_for_value(mu_l: f64, mu_r: f64, v: f64) -> f64 {
    let d = mu_r - mu_l;
    let with = (mu_r * (v + mu_l).max(0.0) - mu_l * (v + mu_r).max(0.0)) / d;
    (with - v.max(0.0)).max(0.0)
}

/// Expected gain of type `k` at the profile <-a, a>.
pub fn gain_of_consumption(sig: &Signal, spec: &ModelSpec, a: f64, k: i32) -> f64 {
    match sig {
        Signal::Null => 0.0,
        Signal::Binary(b) => gain_for_value(b.mu_l, b.mu_r, spec.v_sym(a, k)),
    }
}

/// Strict obedience: v + mu_L < 0 < v + mu_R.
pub fn check_strict_obedience(sig: &BinarySignal, spec: &ModelSpec, a: f64, k: i32) -> bool {
    let v = spec.v_sym(a, k);
    v + sig.mu_l < 0.0 && 0.0 < v + sig.mu_r
}
