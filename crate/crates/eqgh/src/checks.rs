//! The numbered checks behind `paperchecks` and the acceptance suite. Each
//! check reproduces one bound on generated data and reports the worst
//! measured value against it.

use std::f64::consts::PI;
use std::time::Instant;

use eqgh_core::action::{dgh1_upper, Dgh1Config};
use eqgh_core::group::{GeneratedGroup, Homomorphism};
use eqgh_core::linalg::torus_dist;
use eqgh_core::metric::{approx_inverse, distortion, GhaCertificate, MetricSpace, PointMap};
use eqgh_core::metric::{gh_exact, gha_search, SearchConfig};
use eqgh_core::shadowing::{
    build_conjugacy, make_pseudo_orbit, perturb_points, shadow_hyperbolic_toral, tracing_corrections, z_window,
    ConjugacyConfig, ToralSystem,
};
use eqgh_core::systems::{
    example_family, example_isometry_family, rotation_action, two_group_example, CircleGrid, ExampleDynamics,
};
use eqgh_core::wasserstein::{
    contraction_check, folner_average, invariance_defect, invariant_diameter, lift_gha, lifted_epsilon, w_p,
    DiscreteMeasure,
};
use rand::Rng;

use crate::fixtures::{gh_fixture_spaces, integer_metric, random_map, real_metric, rng};
use crate::io::{num, Csv};
use crate::oracle::{dense_tracing_corrections, gh_clique, gh_relations, w_p_vertex, RELATIONS_MAX_PAIRS};
use crate::scenarios::{CAT_MAP, TWO_GROUP_A, TWO_GROUP_C};

/// Number of checks.
pub const CHECK_COUNT: u8 = 12;

/// Rotation step used on the 64-point circle.
pub const FOLNER_STEP: usize = 5;

/// Grid size of the isometric family.
pub const ISOMETRY_MESH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckParams {
    /// Restricts the example-family checks to this `n`.
    pub n: Option<usize>,
    /// Torus grid side.
    pub mesh: usize,
    pub seed: u64,
    /// Local-search budget for the GH searches.
    pub budget: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { n: None, mesh: 32, seed: 0, budget: SearchConfig::default().budget }
    }
}

impl CheckParams {
    fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub id: u8,
    pub name: &'static str,
    pub claim: String,
    pub measured: f64,
    pub bound: f64,
    /// The inequality held (timing not included).
    pub holds: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit: f64,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        self.holds && self.seconds < self.limit
    }

    pub fn line(&self) -> String {
        format!(
            "{}. {}: {}, measured {} vs bound {}, {:.2}s of {}s, {}",
            self.id,
            self.name,
            self.claim,
            num(self.measured),
            num(self.bound),
            self.seconds,
            self.limit,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

struct Outcome {
    claim: String,
    measured: f64,
    bound: f64,
    holds: bool,
    detail: String,
}

type CheckFn = fn(&CheckParams) -> eqgh_core::Result<Outcome>;

const TABLE: [(&str, f64, CheckFn); CHECK_COUNT as usize] = [
    ("GH oracle", 10.0, gh_oracle),
    ("GHA relations", 30.0, gha_relations),
    ("Approximate inverse", 10.0, approximate_inverse),
    ("Example GH distance", 60.0, example_gh_distance),
    ("Example two-group GH distance", 120.0, example_two_group),
    ("Shadowing", 10.0, shadowing),
    ("Conjugacy", 60.0, conjugacy),
    ("Wasserstein oracle", 30.0, wasserstein_oracle),
    ("Contraction", 60.0, contraction),
    ("Lifted GHA", 120.0, lifted_gha),
    ("Folner invariance", 30.0, folner_invariance),
    ("Invariant diameter trend", 60.0, invariant_diameter_trend),
];

pub fn name(id: u8) -> Option<&'static str> {
    TABLE.get((id as usize).checked_sub(1)?).map(|t| t.0)
}

/// Runs check `id` (1-based). Errors from the library become failing rows.
pub fn run_check(id: u8, params: &CheckParams) -> Option<CheckRow> {
    let (name, limit, f) = *TABLE.get((id as usize).checked_sub(1)?)?;
    let start = Instant::now();
    let out = f(params);
    let seconds = start.elapsed().as_secs_f64();
    Some(match out {
        Ok(o) => CheckRow {
            id,
            name,
            claim: o.claim,
            measured: o.measured,
            bound: o.bound,
            holds: o.holds,
            detail: o.detail,
            seconds,
            limit,
        },
        Err(e) => CheckRow {
            id,
            name,
            claim: "error".into(),
            measured: f64::NAN,
            bound: f64::NAN,
            holds: false,
            detail: e.to_string(),
            seconds,
            limit,
        },
    })
}

pub fn run_all(params: &CheckParams) -> Vec<CheckRow> {
    (1..=CHECK_COUNT).filter_map(|id| run_check(id, params)).collect()
}

/// Results as CSV. Timings are left out so identical runs give identical
/// bytes.
pub fn to_csv(rows: &[CheckRow]) -> Csv {
    let mut c = Csv::new("paperchecks", &["id", "check", "claim", "measured", "bound", "holds", "detail"]);
    for r in rows {
        c.push(vec![
            r.id.to_string(),
            r.name.into(),
            r.claim.clone(),
            num(r.measured),
            num(r.bound),
            r.holds.to_string(),
            r.detail.clone(),
        ]);
    }
    c
}

fn gh_oracle(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let spaces = gh_fixture_spaces(p.seed);
    let (mut worst, mut pairs, mut by_relations) = (0.0f64, 0usize, 0usize);
    for i in 0..spaces.len() {
        for j in i..spaces.len() {
            let (x, y) = (&spaces[i], &spaces[j]);
            let exact = gh_exact(x, y, None)?.exact().expect("small spaces are exact");
            let oracle = if x.len() * y.len() <= RELATIONS_MAX_PAIRS {
                by_relations += 1;
                let r = gh_relations(x, y);
                worst = worst.max((r - gh_clique(x, y)).abs());
                r
            } else {
                gh_clique(x, y)
            };
            worst = worst.max((exact - oracle).abs());
            pairs += 1;
        }
    }
    Ok(Outcome {
        claim: "gh_exact equals correspondence enumeration".into(),
        measured: worst,
        bound: 1e-12,
        holds: worst <= 1e-12,
        detail: format!("{pairs} pairs, {by_relations} also by relation enumeration"),
    })
}

fn gha_relations(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let mut r = rng(p.seed ^ 0x2);
    let config = SearchConfig { budget: p.budget, seed: p.seed };
    let (mut upper_slack, mut reverse_gap, mut fails) = (f64::INFINITY, 0.0f64, 0usize);
    for _ in 0..100 {
        let (nx, ny) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let x = real_metric(nx, &mut r);
        let y = real_metric(ny, &mut r);
        let gh = gh_exact(&x, &y, None)?.exact().expect("small spaces are exact");
        let eps = gha_search(&x, &y, config)?.epsilon;
        upper_slack = upper_slack.min(2.0 * eps + 1e-9 - gh);
        reverse_gap = reverse_gap.max(gh - eps);
        if gh > 2.0 * eps + 1e-9 || eps < gh - 1e-9 {
            fails += 1;
        }
    }
    Ok(Outcome {
        claim: "gh ≤ 2ε and ε ≥ gh for every certificate".into(),
        measured: reverse_gap,
        bound: 1e-9,
        holds: fails == 0,
        detail: format!("100 pairs, {fails} failures, min slack of gh ≤ 2ε: {}", num(upper_slack)),
    })
}

fn sup_round_trip<M: MetricSpace + ?Sized>(space: &M, there: &PointMap, back: &PointMap) -> f64 {
    (0..space.len()).map(|i| space.dist(i, back.apply(there.apply(i)))).fold(0.0, f64::max)
}

fn approximate_inverse(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let mut r = rng(p.seed ^ 0x3);
    let (mut worst_ratio, mut fails) = (0.0f64, 0usize);
    for k in 0..200 {
        let (x, y, f) = if k % 2 == 0 {
            let (nx, ny) = (r.gen_range(1..=7), r.gen_range(1..=7));
            let x = if k % 4 == 0 { integer_metric(nx, 5, &mut r) } else { real_metric(nx, &mut r) };
            let y = real_metric(ny, &mut r);
            let f = random_map(nx, ny, &mut r);
            (x, y, f)
        } else {
            // A small perturbation of the identity.
            let n = r.gen_range(2..=7);
            let x = real_metric(n, &mut r);
            let noise = r.gen_range(0.0..0.2);
            let m = x.matrix();
            let jitter: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { 0.0 } else { m[i][j] + noise * ((i * 7 + j * 3) % 5) as f64 / 5.0 })
                        .collect()
                })
                .collect();
            let sym: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| jitter[i][j].max(jitter[j][i])).collect()).collect();
            let y = eqgh_core::metric::FiniteMetricSpace::from_matrix(crate::fixtures::metric_closure(sym))?;
            (x, y, PointMap::identity(n))
        };
        let cert = GhaCertificate::measure(&x, &y, &f)?;
        let eps = cert.distortion.max(cert.net_defect);
        let g = approx_inverse(&x, &y, &f, eps)?;
        let d = distortion(&y, &x, &g)?;
        let rx = sup_round_trip(&x, &f, &g);
        let ry = sup_round_trip(&y, &g, &f);
        let tol = 1e-12;
        if d > 3.0 * eps + tol || rx > 2.0 * eps + tol || ry > eps + tol {
            fails += 1;
        }
        if eps > 0.0 {
            worst_ratio = worst_ratio.max(d / (3.0 * eps)).max(rx / (2.0 * eps)).max(ry / eps);
        }
    }
    Ok(Outcome {
        claim: "inverse distortion ≤ 3ε, round trips ≤ 2ε and ≤ ε".into(),
        measured: worst_ratio,
        bound: 1.0,
        holds: fails == 0,
        detail: format!("200 maps, {fails} failures; measured is the largest ratio to its bound"),
    })
}

fn example_gh_distance(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let dynamics = ExampleDynamics::paper_pair();
    let (mut measured, mut bound, mut holds) = (0.0f64, 0.0f64, true);
    let mut parts = Vec::new();
    let mut claims = Vec::new();
    for n in p.ns(&[2, 4, 8]) {
        let e = example_family(n, p.mesh, &dynamics)?;
        let m = e.measured.max();
        let ok = m <= e.bound + e.slack + eqgh_core::BOUND_TOL && e.slack < 0.15;
        holds &= ok;
        if m - e.bound >= measured - bound {
            measured = m;
            bound = e.bound + e.slack;
        }
        claims.push(format!("n={n} bound √2π/{n}={}", num(e.bound)));
        parts.push(format!(
            "n={n}: isometry {} equivariant {} slack {} (Lipschitz estimate {})",
            num(e
                .measured
                .h_distortion
                .max(e.measured.h_net_defect)
                .max(e.measured.f_distortion)
                .max(e.measured.f_net_defect)),
            num(e.measured.f_equivariant.max(e.measured.h_equivariant)),
            num(e.slack),
            num(e.snap.lipschitz_bound)
        ));
    }
    Ok(Outcome {
        claim: format!("{}, measured ≤ bound+slack", claims.join("; ")),
        measured,
        bound,
        holds,
        detail: parts.join("; "),
    })
}

fn example_two_group(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let (mut measured, mut bound, mut holds) = (0.0f64, 0.0f64, true);
    let mut parts = Vec::new();
    for n in p.ns(&[2, 4]) {
        let e = two_group_example(n, p.mesh, TWO_GROUP_A, TWO_GROUP_C, [(1, 1), (0, 0)])?;
        let config = Dgh1Config {
            search: SearchConfig { budget: 1, seed: p.seed },
            radius: 6,
            rho: Some(e.rho.clone()),
            seeds: vec![e.h.clone()],
            ..Dgh1Config::default()
        };
        let cert = dgh1_upper(&e.alpha, &e.beta_bar, &config)?;
        let b = e.bound + e.slack;
        holds &= cert.epsilon <= b + eqgh_core::BOUND_TOL;
        if cert.epsilon - b >= measured - bound {
            measured = cert.epsilon;
            bound = b;
        }
        parts.push(format!(
            "n={n}: ε {} (distortion {}, net {}, equivariant {}) over ball({})",
            num(cert.epsilon),
            num(cert.distortion),
            num(cert.net_defect),
            num(cert.equivariant),
            cert.radius
        ));
    }
    Ok(Outcome {
        claim: "one-sided distance with ρ(Aᵏ)=(k,0) ≤ √2π/n + slack".into(),
        measured,
        bound,
        holds,
        detail: parts.join("; "),
    })
}

fn shadowing(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let system = ToralSystem::z(CAT_MAP)?;
    let (mut holds, mut oracle_gap, mut ratios) = (true, 0.0f64, Vec::new());
    let (mut tightest, mut measured, mut bound) = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut parts = Vec::new();
    for delta in [1e-2, 1e-3, 1e-4] {
        let po = make_pseudo_orbit(&system, delta, &[0], z_window(50), p.seed)?;
        let t = shadow_hyperbolic_toral(&po, &CAT_MAP)?;
        t.verify(&system, &po)?;
        let eig_bound = t.constant * t.delta_eigen + t.truncation;
        holds &= t.epsilon_eigen <= eig_bound + eqgh_core::BOUND_TOL && t.epsilon <= t.bound + eqgh_core::BOUND_TOL;
        if t.epsilon_eigen / eig_bound > tightest {
            (tightest, measured, bound) = (t.epsilon_eigen / eig_bound, t.epsilon_eigen, eig_bound);
        }
        let series = tracing_corrections(&CAT_MAP, &po.values)?;
        let dense = dense_tracing_corrections(&CAT_MAP, &po.values);
        for (a, b) in series.iter().zip(&dense) {
            oracle_gap = oracle_gap.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        }
        ratios.push(t.epsilon / delta);
        parts.push(format!("δ={delta}: ε {} ≤ {} (C {})", num(t.epsilon), num(t.bound), num(t.constant)));
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    holds &= oracle_gap <= 1e-8 && spread <= 0.05;
    parts.push(format!("dense solve gap {}, ε/δ spread {}", num(oracle_gap), num(spread)));
    Ok(Outcome {
        claim: "cat map, 100 steps: ε ≤ C·δ + truncation (eigen-coordinates)".into(),
        measured,
        bound,
        holds,
        detail: parts.join("; "),
    })
}

fn conjugacy(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let n = p.n.unwrap_or(4);
    let e = example_family(n, p.mesh, &ExampleDynamics::cat_map())?;
    let alpha = ToralSystem::z(CAT_MAP)?;
    let rho = Homomorphism::identity(&GeneratedGroup::z());
    let grid: Vec<[f64; 2]> = (0..e.x.len()).map(|i| e.x.coords(i)).collect();
    let exact: Vec<[f64; 2]> = (0..e.y.len()).map(|y| e.x.coords(e.h.apply(y))).collect();
    let delta = 1e-3;
    let noisy = perturb_points(&exact, delta / 2.0, p.seed);
    let config = ConjugacyConfig { delta: (1.0 + CAT_MAP.operator_norm()) * delta / 2.0, ..ConjugacyConfig::default() };
    let r = build_conjugacy(&noisy, &rho, &alpha, &e.beta, &grid, &config)?;
    let sup = r.h.iter().zip(&noisy).map(|(a, b)| torus_dist(*a, *b)).fold(0.0, f64::max);
    let noisy_ok = sup <= r.epsilon1 + 1e-12 && r.equivariance_defect <= r.tolerance;
    let zero = build_conjugacy(&exact, &rho, &alpha, &e.beta, &grid, &ConjugacyConfig { delta: 0.0, ..config })?;
    let zero_ok = zero.equivariance_defect <= 1e-9;
    Ok(Outcome {
        claim: format!("n={n}, noise δ/2 with δ={delta}: d_sup(h,u) ≤ ε₁, equivariance ≤ truncation"),
        measured: r.equivariance_defect,
        bound: r.tolerance,
        holds: noisy_ok && zero_ok,
        detail: format!(
            "d_sup(h,u) {} ≤ ε₁ {}; zero-noise defect {}; {} non-unique tracers",
            num(sup),
            num(r.epsilon1),
            num(zero.equivariance_defect),
            r.non_unique.len()
        ),
    })
}

fn wasserstein_oracle(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let mut r = rng(p.seed ^ 0x8);
    let space = real_metric(9, &mut r);
    let mut gap = 0.0f64;
    for k in 0..50 {
        let pp = if k % 2 == 0 { 1.0 } else { 2.0 };
        let mu = DiscreteMeasure::random(space.len(), 6, &mut r)?;
        let nu = DiscreteMeasure::random(space.len(), 6, &mut r)?;
        gap = gap.max((w_p(&space, &mu, &nu, pp)? - w_p_vertex(&space, &mu, &nu, pp)).abs());
    }
    let mut axiom_fails = 0usize;
    for k in 0..200 {
        let pp = if k % 2 == 0 { 1.0 } else { 2.0 };
        let m: Vec<DiscreteMeasure> =
            (0..3).map(|_| DiscreteMeasure::random(space.len(), 6, &mut r)).collect::<eqgh_core::Result<_>>()?;
        let ab = w_p(&space, &m[0], &m[1], pp)?;
        let ba = w_p(&space, &m[1], &m[0], pp)?;
        let bc = w_p(&space, &m[1], &m[2], pp)?;
        let ac = w_p(&space, &m[0], &m[2], pp)?;
        let aa = w_p(&space, &m[0], &m[0], pp)?;
        let ok =
            ab >= 0.0 && aa == 0.0 && (ab - ba).abs() <= 1e-9 && ac <= ab + bc + 1e-9 && (ab > 0.0 || m[0] == m[1]);
        if !ok {
            axiom_fails += 1;
        }
    }
    Ok(Outcome {
        claim: "W_p equals vertex enumeration; metric axioms".into(),
        measured: gap,
        bound: 1e-9,
        holds: gap <= 1e-9 && axiom_fails == 0,
        detail: format!("50 pairs, 200 triples, {axiom_fails} axiom failures"),
    })
}

fn contraction(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let mut r = rng(p.seed ^ 0x9);
    let (mut violations, mut worst) = (0usize, f64::NEG_INFINITY);
    for k in 0..1000 {
        let pp = if k % 2 == 0 { 1.0 } else { 2.0 };
        let target = real_metric(r.gen_range(1..=8), &mut r);
        let n = r.gen_range(1..=6);
        let f = random_map(n, target.len(), &mut r);
        let g = random_map(n, target.len(), &mut r);
        let mu = DiscreteMeasure::random(n, n, &mut r)?;
        let c = contraction_check(&target, &f, &g, &mu, pp)?;
        worst = worst.max(c.lhs - c.rhs);
        if c.lhs > c.rhs + 1e-9 {
            violations += 1;
        }
    }
    Ok(Outcome {
        claim: "W_p^p(f_*μ, g_*μ) ≤ Σ μ(x) d(f x, g x)^p".into(),
        measured: worst,
        bound: 1e-9,
        holds: violations == 0,
        detail: format!("1000 instances, {violations} violations"),
    })
}

fn lifted_gha(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let n = 4;
    let e = example_family(n, p.mesh, &ExampleDynamics::paper_pair())?;
    let eps = e.bound + e.slack;
    let mut r = rng(p.seed ^ 0xa);
    let pairs: Vec<(DiscreteMeasure, DiscreteMeasure)> = (0..50)
        .map(|_| Ok((DiscreteMeasure::random(e.x.len(), 6, &mut r)?, DiscreteMeasure::random(e.x.len(), 6, &mut r)?)))
        .collect::<eqgh_core::Result<_>>()?;
    let targets: Vec<DiscreteMeasure> =
        (0..10).map(|_| DiscreteMeasure::random(e.y.len(), 6, &mut r)).collect::<eqgh_core::Result<_>>()?;
    let report = lift_gha(&e.x, &e.y, &e.f, eps, 1.0, &pairs, &targets)?;
    let scale = lifted_epsilon(0.01, 1.0, e.x.diameter(), e.y.diameter());
    Ok(Outcome {
        claim: format!("|W_1(f_*μ,f_*μ′) − W_1(μ,μ′)| ≤ ε̃ for ε = √2π/{n}"),
        measured: report.distortion.max(report.net_defect),
        bound: report.epsilon_tilde,
        holds: report.violations == 0,
        detail: format!(
            "50 pairs, 10 targets, {} violations; ε̃ {} (at ε = 0.01 the formula gives {})",
            report.violations,
            num(report.epsilon_tilde),
            num(scale)
        ),
    })
}

fn folner_invariance(_p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let points = 64;
    let circle = CircleGrid::new(1.0, points)?;
    let angle = 2.0 * PI * FOLNER_STEP as f64 / points as f64;
    let (action, _) = rotation_action(&circle, angle)?;
    let mu = DiscreteMeasure::dirac(points, 0)?;
    let mut defects = Vec::new();
    for n in [4, 8, 16, 32] {
        let avg = folner_average(&mu, &action, None, n)?;
        defects.push(invariance_defect(&avg, &action, 1.0)?);
    }
    let monotone = defects.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let bound = 2.0 * circle.diameter() / 32.0 + circle.step();
    let last = *defects.last().expect("four sizes");
    Ok(Outcome {
        claim: format!("rotation by {FOLNER_STEP}/64: defects decrease, final ≤ 2·diam/32 + mesh"),
        measured: last,
        bound,
        holds: monotone && last <= bound,
        detail: format!("defects at n=4,8,16,32: {}", defects.iter().map(|d| num(*d)).collect::<Vec<_>>().join(" ")),
    })
}

fn invariant_diameter_trend(p: &CheckParams) -> eqgh_core::Result<Outcome> {
    let mut values = Vec::new();
    let (mut holds, mut worst_excess, mut worst_bound) = (true, f64::NEG_INFINITY, 0.0);
    for n in [2, 4, 8] {
        let fam = example_isometry_family(n, ISOMETRY_MESH, FOLNER_STEP)?;
        let d = invariant_diameter(&fam.alpha_n, 1.0, 8, 64, &mut rng(p.seed ^ 0xc))?;
        let b = fam.bound + d.averaging_defect;
        holds &= d.value <= b + eqgh_core::BOUND_TOL;
        if d.value - b > worst_excess {
            worst_excess = d.value - b;
            worst_bound = b;
        }
        values.push(d.value);
    }
    holds &= values.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    Ok(Outcome {
        claim: "invariant-measure diameter decreases, ≤ π/n + averaging defect".into(),
        measured: worst_excess + worst_bound,
        bound: worst_bound,
        holds,
        detail: format!("estimates at n=2,4,8: {}", values.iter().map(|d| num(*d)).collect::<Vec<_>>().join(" ")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_cover_all_ids() {
        assert!((1..=CHECK_COUNT).all(|i| name(i).is_some()));
        assert!(name(0).is_none() && name(CHECK_COUNT + 1).is_none());
    }

    #[test]
    fn csv_has_no_timings() {
        let rows = vec![run_check(11, &CheckParams::default()).unwrap()];
        let text = to_csv(&rows).render();
        assert!(text.starts_with("# eqgh.paperchecks v1\n"));
        assert!(!text.contains("seconds"));
    }
}
