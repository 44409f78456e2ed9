//! Batch front end: scenario files in, deterministic JSON and CSV out.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::equilibrium::{
    brute_force_equilibrium, build_canonical_configuration, coalition_of, equilibrium_set, CanonicalKind,
    EquilibriumOptions, LatitudeSolver, NewsConfiguration,
};
use crate::error::Error;
use crate::model::{ModelSpec, Technology};
use crate::numeric::Tolerances;
use crate::optimizer::{policy_failures, skewness_report, SignalSolver};
use crate::statics::compare::reference_policy;
use crate::statics::{
    compare_personalization, competitive_comparison, lambda_sweep, mass_polarization_effect, region_scan,
    richness_chain, Axis, Checks,
};

pub const DEFAULT_STEP: f64 = 1e-3;

/// Canonical configuration by name, or an explicit one.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConfigurationSpec {
    Canonical(CanonicalKind),
    Inline(NewsConfiguration),
}

#[derive(Debug, Clone, Deserialize)]
pub struct RichnessSpec {
    pub populations: Vec<Vec<f64>>,
    pub draws: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MassPolarizationSpec {
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub model: ModelSpec,
    pub technology: Technology,
    #[serde(default)]
    pub configuration: Option<ConfigurationSpec>,
    #[serde(default)]
    pub policy: Option<f64>,
    /// Target coalition for `latitude`; every single type when absent.
    #[serde(default)]
    pub coalition: Option<Vec<i32>>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub x_axis: Option<Axis>,
    #[serde(default)]
    pub y_axis: Option<Axis>,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub richness: Option<RichnessSpec>,
    #[serde(default)]
    pub mass_polarization: Option<MassPolarizationSpec>,
    #[serde(default)]
    pub competitive: bool,
    pub seed: u64,
    #[serde(flatten)]
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                CliError::Input(format!("scenario not found: {}", path.display()))
            } else {
                CliError::Input(format!("cannot read {}: {e}", path.display()))
            }
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid scenario: {e}")))
    }

    fn solver(&self) -> SignalSolver<'_> {
        SignalSolver::with_tolerances(&self.model, self.tolerances)
    }

    fn configuration(&self, solver: &SignalSolver<'_>) -> Result<NewsConfiguration, Error> {
        match &self.configuration {
            Some(ConfigurationSpec::Inline(c)) => Ok(c.clone()),
            Some(ConfigurationSpec::Canonical(kind)) => {
                build_canonical_configuration(*kind, solver, self.technology, reference_policy(&self.model))
            }
            None => {
                let kind = match self.technology {
                    Technology::Broadcast => CanonicalKind::BroadcastStar,
                    _ => CanonicalKind::IndependentStarStar,
                };
                build_canonical_configuration(kind, solver, self.technology, reference_policy(&self.model))
            }
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solve(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solve(e)
    }
}

impl CliError {
    /// 1 for input or numeric errors, 2 for assumption violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(e) if e.is_assumption() => 2,
            _ => 1,
        }
    }

    /// Single-line JSON diagnostic.
    pub fn diagnostic(&self) -> String {
        let v = match self {
            CliError::Input(m) => json!({ "error": "input", "message": m }),
            CliError::Solve(e @ Error::Assumption2 { a, k, reason }) => json!({
                "error": e.kind(),
                "message": e.to_string(),
                "a": a,
                "k": k,
                "reason": reason,
            }),
            CliError::Solve(e) => json!({ "error": e.kind(), "message": e.to_string() }),
        };
        v.to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "nari", version, about = "Attention-maximizing news and electoral polarization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal signals for every type at the scenario policy.
    Solve(Io),
    /// Policy latitudes of a coalition or of every single type.
    Latitude(Io),
    /// Symmetric equilibrium policy set.
    Equilibrium {
        #[command(flatten)]
        io: Io,
        /// Cross-check against the brute-force grid search.
        #[arg(long)]
        verify: bool,
        /// Grid step of the brute-force search.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Equilibrium polarization along a marginal-cost ladder.
    Sweep(Io),
    /// Two-parameter scan of the assumption and condition regions.
    Region(Io),
    /// Broadcast versus personalized news and further comparisons.
    Compare(Io),
}

impl Command {
    fn io(&self) -> &Io {
        match self {
            Command::Solve(io)
            | Command::Latitude(io)
            | Command::Sweep(io)
            | Command::Region(io)
            | Command::Compare(io)
            | Command::Equilibrium { io, .. } => io,
        }
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    write(dir, name, &s)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "na".to_string(), |x| x.to_string())
}

fn solve(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let a = sc.policy.ok_or_else(|| CliError::Input("solve needs \"policy\"".into()))?;
    let solver = sc.solver();
    let signals = solver.signals(sc.technology, a)?;
    if let Some(f) = policy_failures(&solver, sc.technology, a)?.into_iter().next() {
        return Err(Error::Assumption2 {
            a: f.a,
            k: f.k,
            reason: f.reason,
        }
        .into());
    }
    let per_type: Vec<_> = sc
        .model
        .types()
        .zip(&signals)
        .map(|(k, r)| json!({ "k": k, "result": r }))
        .collect();
    let broadcast = match sc.technology {
        Technology::Broadcast => Some(solver.broadcast(a)?),
        _ => None,
    };
    let skew = match sc.model.k_max() {
        0 => None,
        _ => Some(skewness_report(&solver, a)?),
    };
    write_json(
        out,
        "signals.json",
        &json!({
            "technology": sc.technology,
            "policy": a,
            "signals": per_type,
            "broadcast": broadcast,
            "skewness": skew,
        }),
    )
}

fn latitude(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let k_max = sc.model.k_max();
    let targets: Vec<Vec<i32>> = match &sc.coalition {
        Some(c) => {
            if c.is_empty() || c.iter().any(|k| k.unsigned_abs() as usize > k_max) {
                return Err(CliError::Input("coalition must list types in -K..=K".into()));
            }
            vec![c.clone()]
        }
        None => sc.model.types().map(|k| vec![k]).collect(),
    };
    let lat = LatitudeSolver::new(sc.solver(), sc.technology);
    let reports = targets
        .iter()
        .map(|c| lat.latitude(coalition_of(c, k_max)))
        .collect::<Result<Vec<_>, _>>()?;
    write_json(out, "latitude.json", &json!({ "technology": sc.technology, "latitudes": reports }))
}

fn equilibrium(sc: &Scenario, out: &Path, verify: bool, step: Option<f64>) -> Result<(), CliError> {
    let solver = sc.solver();
    let chi = sc.configuration(&solver)?;
    let q = sc.model.populations();
    let set = equilibrium_set(&solver, sc.technology, &chi, q, EquilibriumOptions::default())?;
    let verification = if verify {
        let step = step.or(sc.step).unwrap_or(DEFAULT_STEP);
        let brute = brute_force_equilibrium(&solver, sc.technology, &chi, q, step)?;
        let delta = (set.a_star - brute.a_max).abs();
        Some(json!({ "step": step, "brute_force": brute, "delta": delta, "agrees": delta <= step }))
    } else {
        None
    };
    write_json(
        out,
        "equilibrium.json",
        &json!({
            "technology": sc.technology,
            "configuration": chi,
            "equilibrium": set,
            "verification": verification,
        }),
    )
}

fn sweep(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    if sc.lambdas.is_empty() {
        return Err(CliError::Input("sweep needs a non-empty \"lambdas\" list".into()));
    }
    let r = lambda_sweep(&sc.solver(), &sc.lambdas)?;
    let mut csv = String::from("lambda,a_b,a_p\n");
    for p in &r.points {
        let _ = writeln!(csv, "{},{},{}", p.lambda, opt(p.a_b), opt(p.a_p));
    }
    write(out, "sweep.csv", &csv)?;
    write_json(out, "sweep.json", &r)
}

fn region(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let (Some(x), Some(y)) = (sc.x_axis, sc.y_axis) else {
        return Err(CliError::Input("region needs \"x_axis\" and \"y_axis\"".into()));
    };
    let grid = region_scan(&sc.model, x, y, sc.checks, sc.tolerances)?;
    write(out, "region.csv", &grid.to_csv())?;
    let mut s = serde_json::to_string(&grid).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    write(out, "region.json", &s)
}

fn compare(sc: &Scenario, out: &Path) -> Result<(), CliError> {
    let solver = sc.solver();
    let personalization = compare_personalization(&solver)?;
    let richness = match &sc.richness {
        Some(r) => Some(richness_chain(&solver, &r.populations, r.draws, sc.seed)?),
        None => None,
    };
    let chi = || {
        build_canonical_configuration(
            CanonicalKind::IndependentStarStar,
            &solver,
            Technology::Personalized,
            reference_policy(&sc.model),
        )
    };
    let mass = match &sc.mass_polarization {
        Some(m) => Some(mass_polarization_effect(&solver, &chi()?, &m.q, &m.q_prime)?),
        None => None,
    };
    let competitive = if sc.competitive {
        let c = chi()?;
        Some(competitive_comparison(&solver, &c, &c)?)
    } else {
        None
    };
    write_json(
        out,
        "compare.json",
        &json!({
            "personalization": personalization,
            "richness": richness,
            "mass_polarization": mass,
            "competitive": competitive,
        }),
    )
}

/// Runs one command.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let io = cli.command.io();
    let sc = Scenario::load(&io.scenario)?;
    match &cli.command {
        Command::Solve(_) => solve(&sc, &io.out),
        Command::Latitude(_) => latitude(&sc, &io.out),
        Command::Equilibrium { verify, step, .. } => equilibrium(&sc, &io.out, *verify, *step),
        Command::Sweep(_) => sweep(&sc, &io.out),
        Command::Region(_) => region(&sc, &io.out),
        Command::Compare(_) => compare(&sc, &io.out),
    }
}

/// Caps the worker pool at NARI_THREADS when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NARI_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("NARI_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

/// Entry point: returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}
