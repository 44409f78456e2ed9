//! Independent oracles and seeded spec generators shared by the
//! integration tests and the acceptance harness.

#![allow(dead_code)]

use nari::{CostKind, ModelSpec, SignalSolver, Technology, UtilityKind};
use nari::optimizer::assumption2_check;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GRID_STEP: f64 = 1e-4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worked() -> ModelSpec {
    ModelSpec::baseline(0.05, UtilityKind::Distance, 10.0, CostKind::Quadratic, 0.6).unwrap()
}

pub fn h(cost: CostKind, mu: f64) -> f64 {
    match cost {
        CostKind::Quadratic => mu * mu,
        CostKind::Entropy => {
            let term = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
            (term(1.0 + mu) + term(1.0 - mu)) / (2.0 * std::f64::consts::LN_2)
        }
    }
}

/// Realization probabilities (pi_L, pi_R) from Bayes plausibility.
pub fn probs(l: f64, r: f64) -> (f64, f64) {
    (r / (r - l), -l / (r - l))
}

pub fn attention(l: f64, r: f64, cost: CostKind) -> f64 {
    let (pl, pr) = probs(l, r);
    pl * h(cost, l) + pr * h(cost, r)
}

/// Expected gain from following the recommendations for a voter whose
/// prior utility difference between R and L is `v`.
pub fn value(l: f64, r: f64, v: f64) -> f64 {
    let (pl, pr) = probs(l, r);
    pl * (v + l).max(0.0) + pr * (v + r).max(0.0) - v.max(0.0)
}

/// v(-a, a, k) for Distance utility.
pub fn v_distance(t: f64, a: f64) -> f64 {
    (t + a).abs() - (t - a).abs()
}

fn golden(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Largest mu_R in [1e-3, 1] with `ok(mu_R)`, scanning down from 1 and
/// bisecting the last crossing.
fn largest_feasible(ok: impl Fn(f64) -> bool) -> Option<f64> {
    if ok(1.0) {
        return Some(1.0);
    }
    let mut r = 1.0;
    while r > 1e-3 {
        let next = r - 1e-3;
        if ok(next) {
            let (mut lo, mut hi) = (next, r);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(lo);
        }
        r = next;
    }
    None
}

#[derive(Debug, Clone, Copy)]
pub struct OracleSignal {
    pub mu_l: f64,
    pub mu_r: f64,
    pub attention: f64,
}

/// Attention-maximizing signal subject to the participation constraint
/// value >= lambda * attention, by a grid over mu_L, the largest feasible
/// mu_R for each, and golden refinement around the best grid point.
pub fn personalized_oracle(v: f64, lambda: f64, cost: CostKind) -> OracleSignal {
    let feasible = |l: f64, r: f64| value(l, r, v) >= lambda * attention(l, r, cost) - 1e-15;
    let objective = |l: f64| match largest_feasible(|r| feasible(l, r)) {
        Some(r) => attention(l, r, cost),
        None => f64::NEG_INFINITY,
    };
    let n = (1.0 / GRID_STEP).round() as usize;
    let (mut best_l, mut best) = (-1.0, objective(-1.0));
    for i in 1..n {
        let l = -1.0 + i as f64 * GRID_STEP;
        let f = objective(l);
        if f > best {
            best = f;
            best_l = l;
        }
    }
    let l = if best_l == -1.0 {
        -1.0
    } else {
        golden(objective, (best_l - GRID_STEP).max(-1.0), (best_l + GRID_STEP).min(-1e-9))
    };
    let r = largest_feasible(|r| feasible(l, r)).expect("refined point is feasible");
    OracleSignal {
        mu_l: l,
        mu_r: r,
        attention: attention(l, r, cost),
    }
}

/// Broadcast oracle: maximizes attention times the mass of voters whose
/// participation constraints hold, over every target set of types.
pub fn broadcast_oracle(values: &[f64], q: &[f64], lambda: f64, cost: CostKind) -> OracleSignal {
    let n = values.len();
    let profit = |l: f64, r: f64| {
        let i = attention(l, r, cost);
        let demand: f64 = (0..n)
            .filter(|&k| value(l, r, values[k]) >= lambda * i - 1e-15)
            .map(|k| q[k])
            .sum();
        i * demand
    };
    let for_set = |set: u32, l: f64| -> Option<(f64, f64)> {
        let ok = |r: f64| {
            let i = attention(l, r, cost);
            (0..n).filter(|&k| set >> k & 1 == 1).all(|k| value(l, r, values[k]) >= lambda * i - 1e-15)
        };
        largest_feasible(ok).map(|r| (r, profit(l, r)))
    };
    let steps = (1.0 / GRID_STEP).round() as usize;
    let mut best = (f64::NEG_INFINITY, -1.0, 1u32);
    for set in 1..(1u32 << n) {
        for i in 0..steps {
            let l = -1.0 + i as f64 * GRID_STEP;
            if let Some((_, p)) = for_set(set, l) {
                if p > best.0 {
                    best = (p, l, set);
                }
            }
        }
    }
    let (_, l0, set) = best;
    let obj = |l: f64| for_set(set, l).map_or(f64::NEG_INFINITY, |(_, p)| p);
    let l = if l0 == -1.0 {
        -1.0
    } else {
        golden(obj, (l0 - GRID_STEP).max(-1.0), (l0 + GRID_STEP).min(-1e-9))
    };
    let (r, _) = for_set(set, l).expect("refined point is feasible");
    OracleSignal {
        mu_l: l,
        mu_r: r,
        attention: attention(l, r, cost),
    }
}

/// Latitude of a single type from its definition: the largest a >= t(k)
/// at which no deviation on a fine grid attracts the type after
/// unfavorable news, given a belief mu_L that is constant in a.
pub fn latitude_oracle(t: f64, mu_l: f64, a_bar: f64) -> f64 {
    let attracted = |a: f64| {
        let n = 20_000;
        (0..=n).any(|i| {
            let ap = -a + 2.0 * a * i as f64 / n as f64;
            -(t - ap).abs() + (t + a).abs() + mu_l > 0.0
        }) || (t.abs() <= a && (t + a).abs() + mu_l > 0.0)
    };
    let (mut lo, mut hi) = (t.abs(), a_bar);
    if !attracted(hi) {
        return a_bar;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if attracted(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Symmetric random populations on 2K+1 types.
pub fn random_populations<R: Rng>(rng: &mut R, k_max: usize) -> Vec<f64> {
    let half: Vec<f64> = (0..k_max).map(|_| rng.gen_range(0.2..1.0)).collect();
    let mid: f64 = rng.gen_range(0.2..1.0);
    let mut q: Vec<f64> = half.iter().rev().copied().collect();
    q.push(mid);
    q.extend(half.iter().copied());
    let s: f64 = q.iter().sum();
    let mut q: Vec<f64> = q.into_iter().map(|x| x / s).collect();
    // Exact symmetry after normalization.
    for i in 0..k_max {
        q[2 * k_max - i] = q[i];
    }
    q
}

/// Increasing positive bliss points for k = 1..K, below `top`.
pub fn random_bliss<R: Rng>(rng: &mut R, k_max: usize, top: f64) -> Vec<f64> {
    let mut pos: Vec<f64> = (0..k_max).map(|_| rng.gen_range(0.05 * top..top)).collect();
    pos.sort_by(f64::total_cmp);
    for i in 1..k_max {
        if pos[i] - pos[i - 1] < 1e-3 * top {
            pos[i] = pos[i - 1] + 1e-3 * top;
        }
    }
    let mut t: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    t.push(0.0);
    t.extend(pos);
    t
}

/// Quadratic-cost Distance spec inside the reduced Assumption-2 region
/// 2 lambda > 1, 8 lambda t(K) < 1.
pub fn random_quadratic_spec<R: Rng>(rng: &mut R, k_max: usize) -> ModelSpec {
    let lambda = rng.gen_range(0.55..3.0);
    let top = rng.gen_range(0.1..0.95) / (8.0 * lambda);
    let t = random_bliss(rng, k_max, top);
    let q = random_populations(rng, k_max);
    ModelSpec::new(k_max, q, t, UtilityKind::Distance, 10.0, CostKind::Quadratic, lambda).unwrap()
}

/// Random spec of either cost kind that passes the Assumption-2 check for
/// both broadcast and personalized news.
pub fn random_a2_spec<R: Rng>(rng: &mut R, k_max: usize, cost: CostKind) -> ModelSpec {
    loop {
        let spec = match cost {
            CostKind::Quadratic => random_quadratic_spec(rng, k_max),
            CostKind::Entropy => {
                let lambda = rng.gen_range(0.7..3.0);
                let top = rng.gen_range(0.01..0.03);
                let t = random_bliss(rng, k_max, top);
                let q = random_populations(rng, k_max);
                ModelSpec::new(k_max, q, t, UtilityKind::Distance, 10.0, CostKind::Entropy, lambda).unwrap()
            }
        };
        let solver = SignalSolver::new(&spec);
        let ok = |tech| assumption2_check(&solver, tech, 16).map(|r| r.passed()).unwrap_or(false);
        if ok(Technology::Personalized) && ok(Technology::Broadcast) {
            return spec;
        }
    }
}
