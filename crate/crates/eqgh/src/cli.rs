//! Argument parsing and the command implementations.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use eqgh_core::action::{dgh1_upper, dgh_s_upper, Dgh1Config};
use eqgh_core::metric::{gh_exact, gha_search, GhValue, SearchConfig};
use eqgh_core::metric::{FiniteMetricSpace, MetricSpace};
use eqgh_core::shadowing::{make_pseudo_orbit, shadow_hyperbolic_toral, z_window, ToralSystem};
use eqgh_core::systems::{
    example_family, example_isometry_family, rotation_action, two_group_example, CircleGrid, ExampleDynamics,
    SystemSpec,
};
use eqgh_core::wasserstein::{folner_average, invariance_defect, wasserstein, DiscreteMeasure};

use crate::checks::{self, CheckParams, FOLNER_STEP};
use crate::fixtures::{real_metric, rng, three_point_pair};
use crate::io::{self, num, Csv, IoError, DATA_DIR_ENV};
use crate::scenarios::{self, ScenarioParams, CAT_MAP, TWO_GROUP_A, TWO_GROUP_C};

#[derive(Debug, Parser)]
#[command(name = "eqgh", version, about = "Equivariant Gromov-Hausdorff distances, shadowing and optimal transport")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gromov-Hausdorff distance between two finite metric spaces.
    Gh(GhArgs),
    /// Equivariant distance bound for a named scenario.
    Egh(EghArgs),
    /// Traces a seeded pseudo-orbit of the cat map.
    Shadow(ShadowArgs),
    /// Wasserstein distance between two measures.
    Ot(OtArgs),
    /// Invariance defects of Følner averages of a circle rotation.
    Folner(FolnerArgs),
    /// Writes a scenario bundle.
    Scenario(ScenarioArgs),
    /// Runs all numbered checks and prints a pass/fail table.
    Paperchecks(PapercheckArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GhArgs {
    /// First space (JSON); the bundled three-point pair when both are absent.
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Node budget for exact search on larger spaces, and local-search budget.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// Writes the value and both approximation certificates as JSON.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EghArgs {
    /// example_family, example_family_cat, two_group or isometry_family.
    #[arg(long, default_value = "example_family")]
    pub scenario: String,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub mesh: usize,
    /// Maps scored per direction; 1 scores only the scenario's own maps.
    #[arg(long, default_value_t = 1)]
    pub budget: usize,
    /// Ball radius for the two-group sup.
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ShadowArgs {
    /// System spec (JSON, family `toral_matrix`); the cat map when absent.
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Pseudo-orbit step sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.001,0.0001")]
    pub delta: Vec<f64>,
    /// Half-width of the window `[-w, w]`.
    #[arg(long, default_value_t = 50)]
    pub window: i64,
    /// Extra allowance on the reported bound.
    #[arg(long, default_value_t = eqgh_core::BOUND_TOL)]
    pub tol: f64,
    /// Writes the tracing results as JSON.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OtArgs {
    /// Space (JSON); a seeded six-point space when absent.
    #[arg(long)]
    pub x: Option<PathBuf>,
    /// Measures (JSON); seeded random measures when absent.
    #[arg(long)]
    pub mu: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FolnerArgs {
    /// Points on the circle.
    #[arg(long, default_value_t = 64)]
    pub mesh: usize,
    /// Largest box size; sizes double from 1.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: String,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub mesh: usize,
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PapercheckArgs {
    /// Restrict the example-family checks to this n.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub mesh: usize,
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] eqgh_core::Error),
    #[error(transparent)]
    Scenario(#[from] scenarios::ScenarioError),
    #[error("{0}")]
    Usage(String),
    #[error("{0} of {1} checks failed")]
    ChecksFailed(usize, usize),
}

impl CliError {
    /// 1 for failed checks, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(..) => 1,
            _ => 2,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gh(a) => gh(a),
        Command::Egh(a) => egh(a),
        Command::Shadow(a) => shadow(a),
        Command::Ot(a) => ot(a),
        Command::Folner(a) => folner(a),
        Command::Scenario(a) => scenario(a),
        Command::Paperchecks(a) => paperchecks(a),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| IoError::File { path: dir.into(), source })?;
            }
            std::fs::write(path, text).map_err(|source| IoError::File { path: path.into(), source })?;
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn gh(a: GhArgs) -> Result<(), CliError> {
    let (x, y) = match (&a.x, &a.y) {
        (Some(px), Some(py)) => (io::read_space(px)?, io::read_space(py)?),
        (None, None) => three_point_pair(),
        _ => return Err(CliError::Usage("give both --x and --y, or neither".into())),
    };
    let value = gh_exact(&x, &y, Some(a.budget as u64))?;
    let search = gha_search(&x, &y, SearchConfig { budget: a.budget, seed: a.common.seed })?;
    let mut c = Csv::new("gh", &["x_points", "y_points", "exact", "lower", "upper", "gha_epsilon"]);
    let exact = match value {
        GhValue::Exact(v) => num(v),
        GhValue::Interval { .. } => String::new(),
    };
    c.push(vec![
        x.len().to_string(),
        y.len().to_string(),
        exact,
        num(value.lower()),
        num(value.upper()),
        num(search.epsilon),
    ]);
    if let Some(path) = &a.cert {
        io::write_json(
            path,
            &serde_json::json!({ "schema": "eqgh.gh_certificate/1", "value": value, "search": search }),
        )?;
    }
    emit(&c.render(), a.common.out.as_deref())
}

fn egh(a: EghArgs) -> Result<(), CliError> {
    let mut c = Csv::new("egh", &["scenario", "n", "quantity", "value"]);
    let mut row = |q: &str, v: f64| c.push(vec![a.scenario.clone(), a.n.to_string(), q.into(), num(v)]);
    let config = SearchConfig { budget: a.budget, seed: a.common.seed };
    match a.scenario.as_str() {
        "example_family" | "example_family_cat" => {
            let dynamics =
                if a.scenario == "example_family" { ExampleDynamics::paper_pair() } else { ExampleDynamics::cat_map() };
            let e = example_family(a.n, a.mesh, &dynamics)?;
            let cert = dgh_s_upper(&e.alpha, &e.beta, config, std::slice::from_ref(&e.f), std::slice::from_ref(&e.h))?;
            row("epsilon", cert.epsilon);
            row("forward_max", cert.forward_defects.max());
            row("backward_max", cert.backward_defects.max());
            row("bound", e.bound);
            row("slack", e.slack);
        }
        "isometry_family" => {
            let e = example_isometry_family(a.n, a.mesh, scenarios::coprime_step(a.mesh))?;
            let cert =
                dgh_s_upper(&e.alpha_n, &e.alpha, config, std::slice::from_ref(&e.h), std::slice::from_ref(&e.f))?;
            row("epsilon", cert.epsilon);
            row("bound", e.bound);
        }
        "two_group" => {
            let e = two_group_example(a.n, a.mesh, TWO_GROUP_A, TWO_GROUP_C, [(1, 1), (0, 0)])?;
            let dc = Dgh1Config {
                search: config,
                radius: a.window,
                rho: Some(e.rho.clone()),
                seeds: vec![e.h.clone()],
                ..Dgh1Config::default()
            };
            let cert = dgh1_upper(&e.alpha, &e.beta_bar, &dc)?;
            row("epsilon", cert.epsilon);
            row("distortion", cert.distortion);
            row("net_defect", cert.net_defect);
            row("equivariant", cert.equivariant);
            row("bound", e.bound);
            row("slack", e.slack);
        }
        other => return Err(CliError::Usage(format!("egh does not know scenario `{other}`"))),
    }
    emit(&c.render(), a.common.out.as_deref())
}

fn shadow(a: ShadowArgs) -> Result<(), CliError> {
    if a.window < 1 {
        return Err(CliError::Usage("--window must be at least 1".into()));
    }
    let matrix = match &a.system {
        None => CAT_MAP,
        Some(p) => match io::read_json::<SystemSpec>(p)? {
            SystemSpec::ToralMatrix { matrix, .. } => matrix,
            other => return Err(CliError::Usage(format!("shadow needs a toral_matrix system, got {}", other.name()))),
        },
    };
    let system = ToralSystem::z(matrix)?;
    let mut c = Csv::new("shadow", &["delta", "epsilon", "ratio", "bound", "holds"]);
    let mut results = Vec::new();
    for &delta in &a.delta {
        if !(delta > 0.0) {
            return Err(CliError::Usage(format!("--delta values must be positive, got {delta}")));
        }
        let po = make_pseudo_orbit(&system, delta, &[0], z_window(a.window), a.common.seed)?;
        let t = shadow_hyperbolic_toral(&po, &matrix)?;
        let eps = t.verify(&system, &po)?;
        let holds = eps <= t.bound + a.tol;
        c.push(vec![num(delta), num(eps), num(eps / delta), num(t.bound), holds.to_string()]);
        results.push(serde_json::json!({ "delta": delta, "tracing": t }));
    }
    if let Some(path) = &a.cert {
        io::write_json(path, &serde_json::json!({ "schema": "eqgh.tracing/1", "matrix": matrix, "results": results }))?;
    }
    emit(&c.render(), a.common.out.as_deref())
}

fn ot(a: OtArgs) -> Result<(), CliError> {
    let mut r = rng(a.common.seed);
    let space: FiniteMetricSpace = match &a.x {
        Some(p) => io::read_space(p)?,
        None => real_metric(6, &mut r),
    };
    let mut measure = |p: &Option<PathBuf>| -> Result<DiscreteMeasure, CliError> {
        Ok(match p {
            Some(p) => io::read_measure(p)?,
            None => DiscreteMeasure::random(space.len(), space.len(), &mut r)?,
        })
    };
    let mu = measure(&a.mu)?;
    let nu = measure(&a.nu)?;
    let (value, coupling) = wasserstein(&space, &mu, &nu, a.p)?;
    let mut c = Csv::new("ot", &["source", "target", "mass", "distance"]);
    for &(i, j, m) in coupling.entries() {
        c.push(vec![i.to_string(), j.to_string(), num(m), num(space.dist(i, j))]);
    }
    eprintln!("W_{} = {value}", a.p);
    let mut text = c.render();
    text.push_str(&format!("# value,{}\n", num(value)));
    emit(&text, a.common.out.as_deref())
}

fn folner(a: FolnerArgs) -> Result<(), CliError> {
    let circle = CircleGrid::new(1.0, a.mesh)?;
    let step = if a.mesh == 64 { FOLNER_STEP } else { scenarios::coprime_step(a.mesh) };
    let (action, _) = rotation_action(&circle, 2.0 * PI * step as f64 / a.mesh as f64)?;
    let mu = DiscreteMeasure::dirac(a.mesh, 0)?;
    let mut c = Csv::new("folner", &["n", "step", "defect"]);
    let mut n = 1;
    while n <= a.n.max(1) {
        let avg = folner_average(&mu, &action, None, n)?;
        c.push(vec![n.to_string(), step.to_string(), num(invariance_defect(&avg, &action, a.p)?)]);
        n *= 2;
    }
    emit(&c.render(), a.common.out.as_deref())
}

fn scenario(a: ScenarioArgs) -> Result<(), CliError> {
    let p = ScenarioParams { n: a.n, mesh: a.mesh, window: a.window, seed: a.common.seed };
    let bundle = scenarios::build(&a.scenario, p)?;
    let out = a
        .common
        .out
        .clone()
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{}.json", a.scenario))));
    emit(&io::to_json(&bundle), out.as_deref())
}

fn paperchecks(a: PapercheckArgs) -> Result<(), CliError> {
    let params = CheckParams { n: a.n, mesh: a.mesh, seed: a.common.seed, budget: a.budget };
    let mut rows = Vec::new();
    for id in 1..=checks::CHECK_COUNT {
        let row = checks::run_check(id, &params).expect("id in range");
        eprintln!("{}", row.line());
        rows.push(row);
    }
    let csv = checks::to_csv(&rows).render();
    if a.common.out.is_some() {
        emit(&csv, a.common.out.as_deref())?;
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed, rows.len()));
    }
    Ok(())
}
