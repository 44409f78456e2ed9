//! Acceptance gate: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion. Exits nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nari::equilibrium::influence::influence_table;
use nari::equilibrium::{
    brute_force_equilibrium, build_canonical_configuration, equilibrium_set, CanonicalKind, EquilibriumOptions,
    NewsConfiguration,
};
use nari::optimizer::competitive_for_value;
use nari::statics::compare::reference_policy;
use nari::statics::{
    compare_personalization, evaluate_conditions, lambda_sweep, mass_polarization_effect, region_scan, richness_chain,
    sosd_compare, Axis, Checks, Parameter,
};
use nari::{CostKind, ModelSpec, SignalSolver, Technology, Tolerances, UtilityKind};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    check((got - want).abs() <= tol, || format!("{name}: got {got}, want {want} (tol {tol:e})"))
}

/// Quadratic closed form for personalized posteriors.
fn c1() -> Outcome {
    let mut rng = rng(101);
    let mut checked = 0;
    for i in 0..50 {
        let k_max = 1 + i % 3;
        let spec = random_quadratic_spec(&mut rng, k_max);
        let solver = SignalSolver::new(&spec);
        let lambda = spec.lambda();
        let t_top = spec.t(k_max as i32);
        let policies = [rng.gen_range(0.0..t_top), rng.gen_range(t_top..2.0 * t_top), 1.0];
        for &a in &policies {
            for k in spec.types() {
                let v = v_distance(spec.t(k), a);
                let want = if k <= 0 {
                    -2.0 * v - 1.0 / (2.0 * lambda)
                } else {
                    -1.0 / (2.0 * lambda)
                };
                let got = solver.personalized(a, k).map_err(|e| e.to_string())?.mu_l();
                close(&format!("spec {i} a={a} k={k}"), got, want, 1e-6)?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} posteriors match"))
}

/// Worked scenario against the constrained grid-search oracle.
fn c2() -> Outcome {
    let spec = worked();
    let solver = SignalSolver::new(&spec);
    let a = 0.5;
    let t1 = spec.t(1);
    let values: Vec<f64> = spec.types().map(|k| v_distance(spec.t(k), a)).collect();
    let pers: Vec<OracleSignal> = values
        .iter()
        .map(|&v| personalized_oracle(v, spec.lambda(), spec.cost()))
        .collect();
    let bro = broadcast_oracle(&values, spec.populations(), spec.lambda(), spec.cost());

    let e = |e: nari::Error| e.to_string();
    for (i, k) in spec.types().enumerate() {
        let got = solver.personalized(a, k).map_err(e)?.mu_l();
        close(&format!("mu_L^p({k}) vs oracle"), got, pers[i].mu_l, 1e-6)?;
        close(&format!("mu_L^p({k}) listed"), got, [-0.633333, -0.833333, -0.833333][i], 1e-6)?;
    }
    let mb = solver.broadcast(a).map_err(e)?.result.mu_l();
    close("mu_L^b vs oracle", mb, bro.mu_l, 1e-6)?;
    close("mu_L^b listed", mb, -0.717129, 1e-6)?;

    let cmp = compare_personalization(&solver).map_err(e)?;
    let lat = |k: i32, tech| {
        nari::equilibrium::policy_latitude(&spec, tech, nari::equilibrium::coalition_of(&[k], 1)).map(|r| r.xi)
    };
    let mut oracle_xi = Vec::new();
    for (i, k) in spec.types().enumerate() {
        let want = latitude_oracle(spec.t(k), pers[i].mu_l, spec.a_bar());
        let got = lat(k, Technology::Personalized).map_err(e)?;
        close(&format!("xi^p({k}) vs oracle"), got, want, 1e-6)?;
        close(&format!("xi^p({k}) listed"), got, [0.683333, 0.833333, 0.783333][i], 1e-6)?;
        oracle_xi.push(want);
    }
    let xb_oracle = latitude_oracle(0.0, bro.mu_l, spec.a_bar());
    let xb = lat(0, Technology::Broadcast).map_err(e)?;
    close("xi^b(0) vs oracle", xb, xb_oracle, 1e-6)?;
    close("xi^b(0) listed", xb, 0.717129, 1e-6)?;

    let cond = evaluate_conditions(&spec).map_err(e)?;
    let star = cond.star.ok_or("(*) not evaluated")?;
    let star_oracle = pers[2].mu_l.abs() - pers[2].mu_r;
    close("(*) lhs vs oracle", star.lhs, star_oracle, 1e-6)?;
    check(star.holds && star_oracle > 2.0 * t1, || "(*) should hold".into())?;
    close("(*) lhs listed", star.lhs, 0.2, 1e-6)?;
    let ds = cond.doublestar.ok_or("(**) not evaluated")?;
    let ds_rhs_oracle = bro.mu_l.abs() - pers[0].mu_l.abs();
    close("(**) rhs vs oracle", ds.rhs, ds_rhs_oracle, 1e-6)?;
    check(!ds.holds && !(spec.t(-1).abs() > ds_rhs_oracle), || "(**) should fail".into())?;

    let ap_oracle = oracle_xi.iter().copied().fold(f64::INFINITY, f64::min);
    close("a^p vs oracle", cmp.a_p, ap_oracle, 1e-6)?;
    close("a^b vs oracle", cmp.a_b, xb_oracle, 1e-6)?;
    check(cmp.a_p < cmp.a_b, || format!("a^p={} should be below a^b={}", cmp.a_p, cmp.a_b))?;
    Ok(format!("a^p={:.6} < a^b={:.6}, (*) holds, (**) fails", cmp.a_p, cmp.a_b))
}

/// Symmetry, skewness, obedience, plausibility and attention ordering.
fn c3() -> Outcome {
    let mut rng = rng(303);
    let mut violations = Vec::new();
    let mut checks = 0;
    for i in 0..20 {
        let cost = if i % 2 == 0 { CostKind::Quadratic } else { CostKind::Entropy };
        let spec = random_a2_spec(&mut rng, 1 + i % 2, cost);
        let solver = SignalSolver::new(&spec);
        let k_max = spec.k_max() as i32;
        let t_top = spec.t(k_max);
        let policies = [
            0.5 * t_top,
            t_top,
            rng.gen_range(t_top..3.0 * t_top),
            0.5,
            rng.gen_range(0.5..spec.a_bar()),
        ];
        for &a in &policies {
            let mut fail = |name: &str, ok: bool| {
                checks += 1;
                if !ok {
                    violations.push(format!("spec {i} a={a}: {name}"));
                }
            };
            let b = solver.broadcast(a).map_err(|e| e.to_string())?.result;
            let (bl, br) = (b.mu_l(), b.mu_r());
            fail("broadcast symmetry", (bl + br).abs() < 1e-9);
            let (pl, pr) = probs(bl, br);
            fail("broadcast plausibility", (pl * bl + pr * br).abs() <= 1e-12);
            let ib = attention(bl, br, cost);
            let pers: Vec<_> = spec
                .types()
                .map(|k| solver.personalized(a, k))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for k in spec.types() {
                let v = v_distance(spec.t(k), a);
                fail(&format!("broadcast obedience k={k}"), v + bl < 0.0 && v + br > 0.0);
                let s = &pers[(k + k_max) as usize];
                let (l, r) = (s.mu_l(), s.mu_r());
                let (pl, pr) = probs(l, r);
                fail(&format!("obedience k={k}"), v + l < 0.0 && v + r > 0.0);
                let sig = s.binary().ok_or("null personalized signal")?;
                fail(&format!("plausibility k={k}"), (sig.pi_l() * l + sig.pi_r() * r).abs() <= 1e-12);
                let mirror = &pers[(-k + k_max) as usize];
                fail(&format!("mirror k={k}"), (mirror.mu_l() + r).abs() < 1e-9);
                fail(&format!("I^b < I^p k={k}"), ib < attention(l, r, cost));
                if k == 0 {
                    fail("median symmetry", (l + r).abs() < 1e-9);
                }
                if k == k_max && a > 0.0 {
                    fail("right extreme skewness", pr > 0.5 && l.abs() > r);
                }
                if k == -k_max && a > 0.0 {
                    fail("left extreme skewness", pl > 0.5 && l.abs() < r);
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{checks} checks, zero violations"))
    } else {
        Err(format!("{} violations, first: {}", violations.len(), violations[0]))
    }
}

fn canonical(solver: &SignalSolver<'_>, tech: Technology) -> nari::Result<NewsConfiguration> {
    let kind = match tech {
        Technology::Broadcast => CanonicalKind::BroadcastStar,
        _ => CanonicalKind::IndependentStarStar,
    };
    build_canonical_configuration(kind, solver, tech, reference_policy(solver.spec))
}

/// Analytic equilibrium set against the brute-force grid search.
fn c4() -> Outcome {
    let mut rng = rng(404);
    let step = 1e-3;
    let uniform = vec![1.0 / 3.0; 3];
    let median = vec![0.2, 0.6, 0.2];
    let mut specs = Vec::new();
    while specs.len() < 20 {
        let cost = if specs.len() % 2 == 0 { CostKind::Quadratic } else { CostKind::Entropy };
        let base = random_a2_spec(&mut rng, 1, cost);
        let variants: Vec<ModelSpec> = [&uniform, &median]
            .iter()
            .map(|q| base.with_populations(q.to_vec()).unwrap())
            .collect();
        let ok = variants.iter().all(|s| {
            let solver = SignalSolver::new(s);
            [Technology::Broadcast, Technology::Personalized].iter().all(|&t| {
                nari::optimizer::assumption2_check(&solver, t, 16)
                    .map(|r| r.passed())
                    .unwrap_or(false)
            })
        });
        if ok {
            specs.push(variants);
        }
    }
    let mut worst = 0.0f64;
    let mut runs = 0;
    for (i, variants) in specs.iter().enumerate() {
        for spec in variants {
            let solver = SignalSolver::new(spec);
            for tech in [Technology::Broadcast, Technology::Personalized] {
                let e = |e: nari::Error| format!("spec {i} {tech:?}: {e}");
                let chi = canonical(&solver, tech).map_err(e)?;
                let q = spec.populations();
                let set = equilibrium_set(&solver, tech, &chi, q, EquilibriumOptions::default()).map_err(e)?;
                let brute = brute_force_equilibrium(&solver, tech, &chi, q, step).map_err(e)?;
                let d = (set.a_star - brute.a_max).abs();
                worst = worst.max(d);
                runs += 1;
                check(d <= step + 1e-12, || {
                    format!("spec {i} {tech:?} q={q:?}: analytic {} vs brute {}", set.a_star, brute.a_max)
                })?;
            }
        }
    }
    Ok(format!("{runs} runs, worst gap {worst:.2e}"))
}

fn all_nonempty(n: usize) -> Vec<bool> {
    (0..1usize << n).map(|c| c != 0).collect()
}

fn majority(q: &[f64]) -> Vec<bool> {
    (0..1usize << q.len())
        .map(|c| (0..q.len()).filter(|&i| c >> i & 1 == 1).map(|i| q[i]).sum::<f64>() > 0.5)
        .collect()
}

/// Influential-coalition families by exhaustive enumeration.
fn c5() -> Outcome {
    let cases: [(Vec<f64>, bool); 6] = [
        (vec![1.0 / 3.0; 3], false),
        (vec![0.2, 0.6, 0.2], true),
        (vec![0.3, 0.4, 0.3], false),
        (vec![0.2; 5], false),
        (vec![0.05, 0.1, 0.7, 0.1, 0.05], true),
        (vec![0.13, 0.21, 0.32, 0.21, 0.13], false),
    ];
    let mut families = 0;
    for (q, median_majority) in &cases {
        let n = q.len();
        let full = (1u32 << n) - 1;
        let star = NewsConfiguration::new(n, vec![0, full], vec![0.4, 0.6], vec![0.6, 0.4]).map_err(|e| e.to_string())?;
        let cols: Vec<u32> = (0..=full).collect();
        let w = vec![1.0 / cols.len() as f64; cols.len()];
        let star_star = NewsConfiguration::new(n, cols, w.clone(), w).map_err(|e| e.to_string())?;
        let got_b = influence_table(&star, q).map_err(|e| e.to_string())?;
        check(got_b == majority(q), || format!("chi* family at q={q:?} is not the majority family"))?;
        let got_p = influence_table(&star_star, q).map_err(|e| e.to_string())?;
        let want_p = if *median_majority { majority(q) } else { all_nonempty(n) };
        check(got_p == want_p, || format!("chi** family at q={q:?} differs from the table"))?;
        families += 2;
    }
    Ok(format!("{families} families match at K=1 and K=2"))
}

/// Marginal-cost monotonicity, competitive posterior ordering.
fn c6() -> Outcome {
    let e = |e: nari::Error| e.to_string();
    let ladders = [
        (worked(), [0.55, 0.6, 0.7, 0.8, 0.9, 1.0]),
        (
            ModelSpec::baseline(0.02, UtilityKind::Distance, 10.0, CostKind::Entropy, 1.0).unwrap(),
            [0.8, 1.0, 1.3, 1.7, 2.2, 2.8],
        ),
    ];
    for (spec, ladder) in &ladders {
        let sweep = lambda_sweep(&SignalSolver::new(spec), ladder).map_err(e)?;
        check(sweep.points.iter().all(|p| p.a_b.is_some() && p.a_p.is_some()), || {
            format!("sweep has unevaluable points under {:?} cost: {:?}", spec.cost(), sweep.points)
        })?;
        check(sweep.broadcast_decreasing && sweep.personalized_decreasing, || {
            format!("a* not strictly decreasing under {:?} cost: {:?}", spec.cost(), sweep.points)
        })?;
    }

    let tilde = [0.6, 0.8, 1.0, 1.5, 2.0, 3.0];
    for cost in [CostKind::Quadratic, CostKind::Entropy] {
        for v in [-0.06, -0.02, 0.0, 0.05] {
            let sigs: Vec<_> = tilde
                .iter()
                .map(|&c| competitive_for_value(v, c, cost, &Tolerances::default()))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            for w in sigs.windows(2) {
                check(w[1].mu_r() < w[0].mu_r() && w[1].mu_l() > w[0].mu_l(), || {
                    format!("competitive posteriors not monotone at v={v} under {cost:?}")
                })?;
            }
        }
    }

    let mut rng = rng(606);
    let mut compared = 0;
    for i in 0..20 {
        let cost = if i % 2 == 0 { CostKind::Quadratic } else { CostKind::Entropy };
        let spec = random_a2_spec(&mut rng, 1 + i % 2, cost);
        let solver = SignalSolver::new(&spec);
        for a in [0.5 * spec.t(1), 0.5] {
            for k in spec.types() {
                let p = solver.personalized(a, k).map_err(e)?.mu_l();
                let c = solver.competitive(a, k, spec.lambda()).map_err(e)?.mu_l();
                check(p < c, || format!("spec {i} a={a} k={k}: mu_L^p={p} not below mu_L^c={c}"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("2 ladders, 8 competitive ladders, {compared} competitive comparisons"))
}

/// Richness chain and mass-polarization ordering.
fn c7() -> Outcome {
    let e = |e: nari::Error| e.to_string();
    let spec = worked();
    let pops = vec![
        vec![1.0 / 3.0; 3],
        vec![0.2, 0.6, 0.2],
        vec![0.3, 0.4, 0.3],
        vec![0.22, 0.56, 0.22],
        vec![0.4, 0.2, 0.4],
    ];
    let chain = richness_chain(&SignalSolver::new(&spec), &pops, 10, 2024).map_err(e)?;
    check(chain.rows.iter().all(|r| r.draws.len() == 10), || {
        format!("only {} consistent draws", chain.rows[0].draws.len())
    })?;
    check(chain.violations() == 0, || format!("{} chain violations", chain.violations()))?;

    let mut rng = rng(707);
    let mut pairs = 0;
    while pairs < 10 {
        let base = random_a2_spec(&mut rng, 2, CostKind::Quadratic);
        let q = base.populations().to_vec();
        // Mean-preserving spread: move mass outward on both sides.
        let from_mid = rng.gen_range(0.0..0.5) * q[2];
        let from_inner = rng.gen_range(0.0..0.5) * q[1];
        let mut qp = q.clone();
        qp[2] -= from_mid;
        for side in [1usize, 3] {
            qp[side] += from_mid / 2.0 - from_inner;
        }
        qp[0] += from_inner;
        qp[4] += from_inner;
        let s: f64 = qp.iter().sum();
        qp.iter_mut().for_each(|x| *x /= s);
        qp[3] = qp[1];
        qp[4] = qp[0];
        if qp.iter().any(|&x| x <= 0.0) || !sosd_compare(&q, &qp).map_err(e)? {
            continue;
        }
        let solver = SignalSolver::new(&base);
        let chi = canonical(&solver, Technology::Personalized).map_err(e)?;
        let r = match mass_polarization_effect(&solver, &chi, &q, &qp) {
            Ok(r) => r,
            Err(nari::Error::HalfTie { .. }) => continue,
            Err(err) => return Err(err.to_string()),
        };
        check(r.holds, || format!("a^(q)={} below a^(q')={} for q={q:?} q'={qp:?}", r.a_q, r.a_q_prime))?;
        pairs += 1;
    }
    Ok(format!(
        "{} draws x {} populations, {} rejected draws, 10 SOSD pairs",
        chain.rows[0].draws.len(),
        pops.len(),
        chain.rejected
    ))
}

/// Region properties of the entropy-cost scan.
fn c8() -> Outcome {
    let base = ModelSpec::baseline(0.05, UtilityKind::Distance, 10.0, CostKind::Entropy, 1.0).unwrap();
    let n = 50;
    let x = Axis {
        parameter: Parameter::Lambda,
        lo: 0.5,
        hi: 3.0,
        n,
    };
    let y = Axis {
        parameter: Parameter::T1,
        lo: 0.01,
        hi: 0.5,
        n,
    };
    let grid = region_scan(&base, x, y, Checks::default(), Tolerances::default()).map_err(|e| e.to_string())?;
    check(grid.cells.len() == n * n, || "cell count".into())?;
    if let Some(c) = grid.cells.iter().find(|c| c.error.is_some()) {
        return Err(format!("cell ({}, {}) failed: {:?}", c.x, c.y, c.error));
    }
    let star = |i: usize, j: usize| grid.cell(i, j).star;
    let evaluable = grid.cells.iter().filter(|c| c.star.is_some()).count();
    check(evaluable > 0, || "no evaluable cells".into())?;
    for j in 0..n {
        for i in 0..n {
            if star(i, j) != Some(true) {
                continue;
            }
            for jj in j..n {
                for ii in i..n {
                    check(star(ii, jj) != Some(false), || {
                        format!(
                            "(*) holds at ({}, {}) but fails at ({}, {})",
                            grid.cell(i, j).x,
                            grid.cell(i, j).y,
                            grid.cell(ii, jj).x,
                            grid.cell(ii, jj).y
                        )
                    })?;
                }
            }
        }
    }
    for j in 0..n {
        check(grid.cell(0, j).assumption2 == Some(false), || {
            format!("assumption 2 holds at the smallest lambda, t1={}", grid.cell(0, j).y)
        })?;
        let holds: Vec<usize> = (0..n).filter(|&i| grid.cell(i, j).assumption2 == Some(true)).collect();
        if let (Some(&lo), Some(&hi)) = (holds.first(), holds.last()) {
            check(hi - lo + 1 == holds.len(), || format!("assumption-2 set at t1={} is not a band", grid.cell(0, j).y))?;
        }
    }
    Ok(format!("{evaluable} evaluable cells of {}", n * n))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome, Duration); 8] = [
        ("C1", "quadratic closed form", c1, Duration::from_secs(10)),
        ("C2", "worked scenario", c2, Duration::from_secs(60)),
        ("C3", "signal invariants", c3, Duration::from_secs(600)),
        ("C4", "equilibrium oracle", c4, Duration::from_secs(300)),
        ("C5", "influential coalitions", c5, Duration::from_secs(600)),
        ("C6", "monotonicity suites", c6, Duration::from_secs(600)),
        ("C7", "richness chain and SOSD", c7, Duration::from_secs(600)),
        ("C8", "condition regions", c8, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(m) if elapsed > budget => Err(format!("{m}; took {elapsed:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(m) => println!("[PASS] {id} {name}: {m} ({elapsed:.1?})"),
            Err(m) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {m} ({elapsed:.1?})");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
