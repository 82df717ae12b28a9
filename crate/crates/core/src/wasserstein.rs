//! Discrete Wasserstein spaces: measures, couplings, exact `W_p`, pushforwards,
//! lifted approximations and Følner averaging.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::action::{ActionMode, FiniteAction};
use crate::error::{domain, precondition, refused, violated, Result};
use crate::group::{Element, GroupKind};
use crate::linalg::powf;
use crate::metric::{approx_inverse, is_eps_isometry, MetricSpace, PointMap};
use crate::transport::min_cost_transport;
use crate::BOUND_TOL;

/// Tolerance on coupling marginals.
pub const MARGINAL_TOL: f64 = 1e-9;

/// A probability vector on the points of a finite space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Normalises non-negative weights with positive total.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(domain!("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(domain!("weights sum to {total}"));
        }
        let weights = if (total - 1.0).abs() <= 1e-12 { weights } else { weights.iter().map(|w| w / total).collect() };
        Ok(DiscreteMeasure { weights })
    }

    pub fn dirac(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(domain!("point {at} outside a {n}-point space"));
        }
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        Ok(DiscreteMeasure { weights: w })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_on(n, &(0..n).collect::<Vec<_>>())
    }

    pub fn uniform_on(n: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() || support.iter().any(|&i| i >= n) {
            return Err(domain!("support must be a non-empty subset of 0..{n}"));
        }
        let mut w = vec![0.0; n];
        for &i in support {
            w[i] += 1.0;
        }
        Self::new(w)
    }

    /// Random measure on at most `max_support` distinct points.
    pub fn random<R: Rng + ?Sized>(n: usize, max_support: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || max_support == 0 {
            return Err(domain!("need a non-empty space and support"));
        }
        let k = rng.gen_range(1..=max_support.min(n));
        let mut w = vec![0.0; n];
        for _ in 0..k {
            w[rng.gen_range(0..n)] += rng.gen_range(0.05..1.0);
        }
        Self::new(w)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// `(1 − t)·self + t·other`.
    pub fn mix(&self, other: &DiscreteMeasure, t: f64) -> Result<Self> {
        if self.len() != other.len() || !(0.0..=1.0).contains(&t) {
            return Err(domain!("mixing needs measures on the same space and t in [0, 1]"));
        }
        Ok(DiscreteMeasure {
            weights: self.weights.iter().zip(&other.weights).map(|(a, b)| (1.0 - t) * a + t * b).collect(),
        })
    }

    fn check_space<M: MetricSpace + ?Sized>(&self, space: &M) -> Result<()> {
        if self.len() != space.len() {
            return Err(domain!("measure has {} weights, space has {} points", self.len(), space.len()));
        }
        Ok(())
    }
}

/// A transport plan, stored as its non-zero entries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coupling {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Coupling {
    /// Validates both marginals against `mu` and `nu`.
    pub fn new(mu: &DiscreteMeasure, nu: &DiscreteMeasure, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let (rows, cols) = (mu.len(), nu.len());
        let mut r = vec![0.0; rows];
        let mut c = vec![0.0; cols];
        for &(i, j, m) in &entries {
            if i >= rows || j >= cols || !(m >= 0.0) {
                return Err(domain!("invalid coupling entry ({i}, {j}, {m})"));
            }
            r[i] += m;
            c[j] += m;
        }
        for (i, (a, b)) in r.iter().zip(mu.weights()).enumerate() {
            if (a - b).abs() > MARGINAL_TOL {
                return Err(domain!("row {i} sums to {a}, expected {b}"));
            }
        }
        for (j, (a, b)) in c.iter().zip(nu.weights()).enumerate() {
            if (a - b).abs() > MARGINAL_TOL {
                return Err(domain!("column {j} sums to {a}, expected {b}"));
            }
        }
        let entries = entries.into_iter().filter(|e| e.2 > 0.0).collect();
        Ok(Coupling { rows, cols, entries })
    }

    pub fn product(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Self> {
        let mut e = Vec::new();
        for i in mu.support() {
            for j in nu.support() {
                e.push((i, j, mu.weights[i] * nu.weights[j]));
            }
        }
        Self::new(mu, nu, e)
    }

    pub fn diagonal(mu: &DiscreteMeasure) -> Self {
        Coupling {
            rows: mu.len(),
            cols: mu.len(),
            entries: mu.support().into_iter().map(|i| (i, i, mu.weights[i])).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Coupling {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|&(i, j, m)| (j, i, m)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for &(i, j, m) in &self.entries {
            d[i][j] += m;
        }
        d
    }
}

fn pow_p(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        powf(d, p)
    }
}

fn root_p(c: f64, p: f64) -> f64 {
    if p == 1.0 {
        c
    } else if p == 2.0 {
        crate::linalg::sqrt(c)
    } else {
        powf(c, 1.0 / p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(domain!("p must be at least 1, got {p}"));
    }
    Ok(())
}

/// `Σ π(i, j) d(i, j)^p`.
pub fn transport_cost<M: MetricSpace + ?Sized>(space: &M, coupling: &Coupling, p: f64) -> Result<f64> {
    check_p(p)?;
    if coupling.rows != space.len() || coupling.cols != space.len() {
        return Err(domain!("coupling does not live on this space"));
    }
    Ok(coupling.entries.iter().map(|&(i, j, m)| m * pow_p(space.dist(i, j), p)).sum())
}

fn solve<M: MetricSpace + ?Sized>(
    space: &M,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<(f64, Coupling)> {
    let (sa, sb) = (mu.support(), nu.support());
    let supply: Vec<f64> = sa.iter().map(|&i| mu.weights[i]).collect();
    let demand: Vec<f64> = sb.iter().map(|&j| nu.weights[j]).collect();
    let cost: Vec<Vec<f64>> = sa.iter().map(|&i| sb.iter().map(|&j| pow_p(space.dist(i, j), p)).collect()).collect();
    let plan = min_cost_transport(&supply, &demand, &cost)?;
    let mut entries = Vec::new();
    for (a, row) in plan.flow.iter().enumerate() {
        for (b, &m) in row.iter().enumerate() {
            if m > 0.0 {
                entries.push((sa[a], sb[b], m));
            }
        }
    }
    let coupling = Coupling { rows: mu.len(), cols: nu.len(), entries };
    Ok((root_p(plan.cost.max(0.0), p), coupling))
}

/// Exact `W_p(μ, ν)` and an optimal coupling.
///
/// The problem is always solved with the lexicographically smaller weight
/// vector as the supply side, so the value is exactly symmetric.
pub fn wasserstein<M: MetricSpace + ?Sized>(
    space: &M,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<(f64, Coupling)> {
    check_p(p)?;
    mu.check_space(space)?;
    nu.check_space(space)?;
    if mu == nu {
        return Ok((0.0, Coupling::diagonal(mu)));
    }
    let swap = mu.weights.iter().partial_cmp(nu.weights.iter()) == Some(core::cmp::Ordering::Greater);
    if swap {
        let (v, c) = solve(space, nu, mu, p)?;
        Ok((v, c.transpose()))
    } else {
        solve(space, mu, nu, p)
    }
}

/// `W_p` value only.
pub fn w_p<M: MetricSpace + ?Sized>(space: &M, mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    Ok(wasserstein(space, mu, nu, p)?.0)
}

/// `f_*μ`.
pub fn pushforward(f: &PointMap, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if f.source_len() != mu.len() {
        return Err(domain!("map has {} source points, measure has {}", f.source_len(), mu.len()));
    }
    let mut w = vec![0.0; f.target_len()];
    for (i, &m) in mu.weights.iter().enumerate() {
        if m > 0.0 {
            w[f.apply(i)] += m;
        }
    }
    Ok(DiscreteMeasure { weights: w })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContractionCheck {
    /// `W_p^p(f_*μ, g_*μ)`.
    pub lhs: f64,
    /// `Σ μ(i) d(f i, g i)^p`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `W_p^p(f_*μ, g_*μ)` with `∫ d^p(f, g) dμ`.
pub fn contraction_check<Y: MetricSpace + ?Sized>(
    target: &Y,
    f: &PointMap,
    g: &PointMap,
    mu: &DiscreteMeasure,
    p: f64,
) -> Result<ContractionCheck> {
    check_p(p)?;
    if f.source_len() != g.source_len() || f.target_len() != g.target_len() || f.target_len() != target.len() {
        return Err(domain!("maps must share source and target"));
    }
    let fm = pushforward(f, mu)?;
    let gm = pushforward(g, mu)?;
    let lhs = pow_p(w_p(target, &fm, &gm, p)?, p);
    let rhs = mu
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(i, &m)| m * pow_p(target.dist(f.apply(i), g.apply(i)), p))
        .sum();
    Ok(ContractionCheck { lhs, rhs, holds: lhs <= rhs + BOUND_TOL })
}

/// `ε̃ = 8ε + (9p(diam₁^{p−1} + diam₂^{p−1})ε)^{1/p}`.
pub fn lifted_epsilon(epsilon: f64, p: f64, diam1: f64, diam2: f64) -> f64 {
    let m = powf(diam1, p - 1.0) + powf(diam2, p - 1.0);
    8.0 * epsilon + powf(9.0 * p * m * epsilon, 1.0 / p)
}

/// `D(ε) = 28ε + (9p(diam₁^{p−1} + diam₂^{p−1})ε)^{1/p}`.
pub fn invariant_net_epsilon(epsilon: f64, p: f64, diam1: f64, diam2: f64) -> f64 {
    let m = powf(diam1, p - 1.0) + powf(diam2, p - 1.0);
    28.0 * epsilon + powf(9.0 * p * m * epsilon, 1.0 / p)
}

/// Measured defects of `f_*` on sampled measures against `ε̃`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LiftReport {
    pub epsilon: f64,
    pub epsilon_tilde: f64,
    pub p: f64,
    /// Largest `|W_p(f_*μ, f_*μ′) − W_p(μ, μ′)|` over the sampled pairs.
    pub distortion: f64,
    /// Largest distance from a sampled target measure to `f_*` of some
    /// measure (the pushforward of its approximation-inverse image).
    pub net_defect: f64,
    /// Largest `W_p(β_s* f_*μ, f_* α_s* μ)`, when actions were supplied.
    pub equivariant: Option<f64>,
    pub pairs: usize,
    pub violations: usize,
}

impl LiftReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks the lifted approximation `f_*: P_p(X) → P_p(Y)` on samples:
/// `pairs` are measures on `X`, `targets` measures on `Y`.
pub fn lift_gha<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    f: &PointMap,
    epsilon: f64,
    p: f64,
    pairs: &[(DiscreteMeasure, DiscreteMeasure)],
    targets: &[DiscreteMeasure],
) -> Result<LiftReport> {
    check_p(p)?;
    let (ok, cert) = is_eps_isometry(x, y, f, epsilon)?;
    if !ok {
        return Err(precondition!(
            "map is not a {epsilon}-isometry (distortion {}, net defect {})",
            cert.distortion,
            cert.net_defect
        ));
    }
    let et = lifted_epsilon(epsilon, p, x.diameter(), y.diameter());
    let mut violations = 0usize;
    let mut distortion = 0.0f64;
    for (a, b) in pairs {
        let w = w_p(x, a, b, p)?;
        let wf = w_p(y, &pushforward(f, a)?, &pushforward(f, b)?, p)?;
        let d = (wf - w).abs();
        distortion = distortion.max(d);
        if d > et + BOUND_TOL {
            violations += 1;
        }
    }
    let mut net_defect = 0.0f64;
    if !targets.is_empty() {
        let inv = approx_inverse(x, y, f, epsilon)?;
        let round = inv.then(f)?;
        for nu in targets {
            let d = w_p(y, nu, &pushforward(&round, nu)?, p)?;
            net_defect = net_defect.max(d);
            if d > et + BOUND_TOL {
                violations += 1;
            }
        }
    }
    Ok(LiftReport {
        epsilon,
        epsilon_tilde: et,
        p,
        distortion,
        net_defect,
        equivariant: None,
        pairs: pairs.len(),
        violations,
    })
}

/// [`lift_gha`] on the actions' spaces, adding the equivariant defect
/// `W_p(β_s* f_*μ, f_* α_s* μ)` over every sampled measure on `X`.
pub fn lift_gha_equivariant<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    f: &PointMap,
    epsilon: f64,
    p: f64,
    pairs: &[(DiscreteMeasure, DiscreteMeasure)],
    targets: &[DiscreteMeasure],
) -> Result<LiftReport> {
    if alpha.group().kind() != beta.group().kind() {
        return Err(domain!("actions of different groups"));
    }
    let mut report = lift_gha(alpha.space(), beta.space(), f, epsilon, p, pairs, targets)?;
    let mut worst = 0.0f64;
    for (s, t) in alpha.generator_maps().iter().zip(beta.generator_maps()) {
        for (a, b) in pairs {
            for mu in [a, b] {
                let lhs = pushforward(t, &pushforward(f, mu)?)?;
                let rhs = pushforward(f, &pushforward(s, mu)?)?;
                let d = w_p(beta.space(), &lhs, &rhs, p)?;
                worst = worst.max(d);
                if d > report.epsilon_tilde + BOUND_TOL {
                    report.violations += 1;
                }
            }
        }
    }
    report.equivariant = Some(worst);
    Ok(report)
}

/// Boxes `[0, n)` in `Z`, `[0, n)²` in `Z²`, and `[0, n) mod m` in `Z/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FolnerSequence {
    kind: GroupKind,
}

impl FolnerSequence {
    pub fn new(kind: GroupKind) -> Result<Self> {
        if let GroupKind::FreeMonoid(_) = kind {
            return Err(refused!("free monoids are not amenable groups; no Følner sets"));
        }
        Ok(FolnerSequence { kind })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// The `n`-th set, as group elements.
    pub fn set(&self, n: usize) -> Vec<Element> {
        let n = n.max(1);
        match self.kind {
            GroupKind::Z => (0..n as i64).map(Element::Z).collect(),
            GroupKind::Z2 => (0..n as i64).flat_map(|a| (0..n as i64).map(move |b| Element::Z2(a, b))).collect(),
            GroupKind::Cyclic(m) => {
                let mut v: Vec<u32> = (0..n as u64).map(|k| (k % m as u64) as u32).collect();
                v.sort_unstable();
                v.dedup();
                v.into_iter().map(Element::Cyclic).collect()
            }
            GroupKind::FreeMonoid(_) => unreachable!("rejected in new"),
        }
    }

    /// `max_s |sF_n Δ F_n| / |F_n|` over the generators.
    pub fn boundary_ratio(&self, n: usize) -> f64 {
        let n = n.max(1);
        match self.kind {
            GroupKind::Z | GroupKind::Z2 => 2.0 / n as f64,
            GroupKind::Cyclic(m) => {
                if n as u64 >= m as u64 {
                    0.0
                } else {
                    2.0 / n as f64
                }
            }
            GroupKind::FreeMonoid(_) => unreachable!("rejected in new"),
        }
    }
}

fn require_group_mode<S: MetricSpace>(action: &FiniteAction<S>) -> Result<FolnerSequence> {
    if action.mode() != ActionMode::Group {
        return Err(refused!("averaging needs a group-mode action"));
    }
    FolnerSequence::new(action.group().kind())
}

/// `(1/|F_n|) Σ_{g ∈ F_n} α(g)_* (f_*μ)`.
pub fn folner_average<S: MetricSpace>(
    mu: &DiscreteMeasure,
    action: &FiniteAction<S>,
    f: Option<&PointMap>,
    n: usize,
) -> Result<DiscreteMeasure> {
    let folner = require_group_mode(action)?;
    let start = match f {
        Some(f) => {
            if f.target_len() != action.space().len() {
                return Err(domain!("map does not land in the acting space"));
            }
            pushforward(f, mu)?
        }
        None => {
            mu.check_space(action.space())?;
            mu.clone()
        }
    };
    let gens = action.generator_maps();
    let mut acc = vec![0.0; start.len()];
    let mut count = 0usize;
    let mut add = |m: &DiscreteMeasure| {
        for (a, w) in acc.iter_mut().zip(&m.weights) {
            *a += w;
        }
        count += 1;
    };
    match folner.kind() {
        GroupKind::Z => {
            let mut cur = start;
            for k in 0..n.max(1) {
                if k > 0 {
                    cur = pushforward(&gens[0], &cur)?;
                }
                add(&cur);
            }
        }
        GroupKind::Z2 => {
            let mut row = start;
            for a in 0..n.max(1) {
                if a > 0 {
                    row = pushforward(&gens[0], &row)?;
                }
                let mut cur = row.clone();
                for b in 0..n.max(1) {
                    if b > 0 {
                        cur = pushforward(&gens[1], &cur)?;
                    }
                    add(&cur);
                }
            }
        }
        GroupKind::Cyclic(m) => {
            let mut cur = start;
            for k in 0..n.max(1).min(m as usize) {
                if k > 0 {
                    cur = pushforward(&gens[0], &cur)?;
                }
                add(&cur);
            }
        }
        GroupKind::FreeMonoid(_) => unreachable!("rejected above"),
    }
    let c = count as f64;
    Ok(DiscreteMeasure { weights: acc.into_iter().map(|w| w / c).collect() })
}

/// `max_{s ∈ S} W_p(α(s)_*μ, μ)` over the symmetric generating set.
pub fn invariance_defect<S: MetricSpace>(mu: &DiscreteMeasure, action: &FiniteAction<S>, p: f64) -> Result<f64> {
    require_group_mode(action)?;
    mu.check_space(action.space())?;
    let mut worst = 0.0f64;
    for s in action.step_maps() {
        worst = worst.max(w_p(action.space(), &pushforward(s, mu)?, mu, p)?);
    }
    Ok(worst)
}

/// Transport bound for moving mass `t` (in total variation) across a space
/// of diameter `diam`: `diam·t^{1/p}`.
pub fn mass_shift_bound(diam: f64, t: f64, p: f64) -> f64 {
    diam * root_p(t.clamp(0.0, 1.0), p)
}

/// Images of invariant measures under averaged pushforward, with the
/// pairwise and witness checks against `D(ε)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetLiftReport {
    pub images: Vec<DiscreteMeasure>,
    pub d_epsilon: f64,
    /// Finite-`n` slack: twice the largest invariance defect in `T` plus the
    /// averaging mass-shift bound on the target.
    pub slack: f64,
    pub folner_n: usize,
    pub boundary_ratio: f64,
    pub pair_distortion: f64,
    pub witness_distance: Option<f64>,
    /// Always phrased as tested against finitely many witnesses.
    pub note: String,
    pub holds: bool,
}

/// Averages `f_*μ` for each invariant `μ ∈ T` and checks the `D(ε)` bounds.
#[allow(clippy::too_many_arguments)]
pub fn invariant_net_lift<X: MetricSpace, Y: MetricSpace>(
    alpha: &FiniteAction<X>,
    beta: &FiniteAction<Y>,
    t: &[DiscreteMeasure],
    f: &PointMap,
    epsilon: f64,
    p: f64,
    n: usize,
    invariance_tol: f64,
    witnesses: &[DiscreteMeasure],
) -> Result<NetLiftReport> {
    check_p(p)?;
    let (x, y) = (alpha.space(), beta.space());
    let (ok, _) = is_eps_isometry(x, y, f, epsilon)?;
    if !ok {
        return Err(precondition!("map is not a {epsilon}-isometry"));
    }
    let folner = require_group_mode(beta)?;
    let mut max_defect = 0.0f64;
    for (i, mu) in t.iter().enumerate() {
        let d = invariance_defect(mu, alpha, p)?;
        if d > invariance_tol {
            return Err(precondition!("measure {i} has invariance defect {d} > {invariance_tol}"));
        }
        max_defect = max_defect.max(d);
    }
    let d_eps = invariant_net_epsilon(epsilon, p, x.diameter(), y.diameter());
    let ratio = folner.boundary_ratio(n);
    let slack = 2.0 * max_defect + mass_shift_bound(y.diameter(), ratio, p);
    let images = t.iter().map(|mu| folner_average(mu, beta, Some(f), n)).collect::<Result<Vec<_>>>()?;
    let mut pair_distortion = 0.0f64;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            let a = w_p(x, &t[i], &t[j], p)?;
            let b = w_p(y, &images[i], &images[j], p)?;
            pair_distortion = pair_distortion.max((a - b).abs());
        }
    }
    let witness_distance = if witnesses.is_empty() || images.is_empty() {
        None
    } else {
        let mut worst = 0.0f64;
        for nu in witnesses {
            let mut best = f64::INFINITY;
            for im in &images {
                best = best.min(w_p(y, nu, im, p)?);
            }
            worst = worst.max(best);
        }
        Some(worst)
    };
    let bound = d_eps + slack + BOUND_TOL;
    let holds = pair_distortion <= bound && witness_distance.is_none_or(|w| w <= bound);
    if pair_distortion > bound {
        return Err(violated!("pairwise distortion {pair_distortion} exceeds D(ε) + slack = {bound}"));
    }
    Ok(NetLiftReport {
        images,
        d_epsilon: d_eps,
        slack,
        folner_n: n,
        boundary_ratio: ratio,
        pair_distortion,
        witness_distance,
        note: alloc::format!("tested against {} witnesses", witnesses.len()),
        holds,
    })
}

/// Estimate of the diameter of the invariant measures.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvariantDiameter {
    pub value: f64,
    /// Largest invariance defect among the averaged samples.
    pub averaging_defect: f64,
    pub samples: usize,
    pub folner_n: usize,
}

/// Averages a Dirac at 0, a Dirac at the point farthest from 0 and
/// `n_samples − 2` random measures over `F_n`, and returns the largest
/// pairwise `W_p` between the results.
pub fn invariant_diameter<S: MetricSpace, R: Rng + ?Sized>(
    action: &FiniteAction<S>,
    p: f64,
    n_samples: usize,
    n: usize,
    rng: &mut R,
) -> Result<InvariantDiameter> {
    check_p(p)?;
    require_group_mode(action)?;
    let space = action.space();
    let len = space.len();
    if len == 0 {
        return Err(domain!("empty space"));
    }
    let far = (0..len).fold(0, |b, i| if space.dist(0, i) > space.dist(0, b) { i } else { b });
    let mut raw = vec![DiscreteMeasure::dirac(len, 0)?, DiscreteMeasure::dirac(len, far)?];
    while raw.len() < n_samples.max(2) {
        raw.push(DiscreteMeasure::random(len, 4, rng)?);
    }
    let mut avg = Vec::with_capacity(raw.len());
    let mut defect = 0.0f64;
    for mu in &raw {
        let a = folner_average(mu, action, None, n)?;
        defect = defect.max(invariance_defect(&a, action, p)?);
        avg.push(a);
    }
    let mut value = 0.0f64;
    for i in 0..avg.len() {
        for j in i + 1..avg.len() {
            value = value.max(w_p(space, &avg[i], &avg[j], p)?);
        }
    }
    Ok(InvariantDiameter { value, averaging_defect: defect, samples: avg.len(), folner_n: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GeneratedGroup;
    use crate::metric::FiniteMetricSpace;

    fn line(c: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::line(c).unwrap()
    }

    fn cycle_action(m: usize, k: usize) -> FiniteAction<FiniteMetricSpace> {
        let d: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let s = (i + m - j) % m;
                        s.min(m - s) as f64
                    })
                    .collect()
            })
            .collect();
        let sp = FiniteMetricSpace::from_matrix(d).unwrap();
        let g = PointMap::from_fn(m, m, |i| (i + k) % m).unwrap();
        FiniteAction::new(GeneratedGroup::z(), sp, vec![g], ActionMode::Group).unwrap()
    }

    #[test]
    fn formulas() {
        assert!((lifted_epsilon(0.01, 1.0, 1.0, 1.0) - 0.26).abs() < 1e-12);
        assert!((invariant_net_epsilon(0.01, 1.0, 1.0, 1.0) - 0.46).abs() < 1e-12);
        assert_eq!(lifted_epsilon(0.0, 2.0, 3.0, 4.0), 0.0);
    }

    #[test]
    fn diracs_and_line() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        for p in [1.0, 2.0, 3.5] {
            let d = w_p(&s, &DiscreteMeasure::dirac(4, 0).unwrap(), &DiscreteMeasure::dirac(4, 3).unwrap(), p).unwrap();
            assert!((d - 3.0).abs() < 1e-12);
        }
        let a = DiscreteMeasure::uniform_on(4, &[0, 1]).unwrap();
        let b = DiscreteMeasure::uniform_on(4, &[2, 3]).unwrap();
        assert!((w_p(&s, &a, &b, 1.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(w_p(&s, &a, &a, 2.0).unwrap(), 0.0);
        assert!(w_p(&s, &a, &b, 0.5).is_err());
    }

    #[test]
    fn cost_of_product_coupling() {
        let s = line(&[0.0, 1.0]);
        let mu = DiscreteMeasure::dirac(2, 0).unwrap();
        let nu = DiscreteMeasure::dirac(2, 1).unwrap();
        let c = Coupling::product(&mu, &nu).unwrap();
        assert_eq!(transport_cost(&s, &c, 1.0).unwrap(), 1.0);
        assert_eq!(transport_cost(&s, &Coupling::diagonal(&mu), 1.0).unwrap(), 0.0);
        assert!(Coupling::new(&mu, &nu, vec![(0, 0, 1.0)]).is_err());
    }

    #[test]
    fn pushforward_folds() {
        let mu = DiscreteMeasure::new(vec![0.125, 0.25, 0.5, 0.125]).unwrap();
        let fold = PointMap::new(4, 2, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(pushforward(&fold, &mu).unwrap().weights(), &[0.625, 0.375]);
        let c = PointMap::constant(4, 4, 2).unwrap();
        assert_eq!(pushforward(&c, &mu).unwrap(), DiscreteMeasure::dirac(4, 2).unwrap());
    }

    #[test]
    fn rotation_contraction() {
        let a = cycle_action(8, 1);
        let mu = DiscreteMeasure::uniform(8).unwrap();
        let id = PointMap::identity(8);
        let r = contraction_check(a.space(), &id, &a.generator_maps()[0], &mu, 2.0).unwrap();
        assert!(r.holds);
        assert!((r.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn folner_sets() {
        let z = FolnerSequence::new(GroupKind::Z).unwrap();
        assert_eq!(z.set(3).len(), 3);
        assert_eq!(z.boundary_ratio(8), 0.25);
        let z2 = FolnerSequence::new(GroupKind::Z2).unwrap();
        assert_eq!(z2.set(3).len(), 9);
        let c = FolnerSequence::new(GroupKind::Cyclic(5)).unwrap();
        assert_eq!(c.set(7).len(), 5);
        assert_eq!(c.boundary_ratio(5), 0.0);
        assert!(FolnerSequence::new(GroupKind::FreeMonoid(2)).is_err());
    }

    #[test]
    fn averaging_dirac_on_orbit() {
        // Rotation by 4 on 12 points has orbits of length 3.
        let a = cycle_action(12, 4);
        let avg = folner_average(&DiscreteMeasure::dirac(12, 1).unwrap(), &a, None, 3).unwrap();
        assert_eq!(avg, DiscreteMeasure::uniform_on(12, &[1, 5, 9]).unwrap());
        assert!(invariance_defect(&avg, &a, 1.0).unwrap() < 1e-12);
        let d = invariance_defect(&DiscreteMeasure::dirac(12, 0).unwrap(), &a, 1.0).unwrap();
        assert_eq!(d, 4.0);
    }

    #[test]
    fn identity_action_diameter() {
        let s = line(&[0.0, 2.5]);
        let a = FiniteAction::trivial(GeneratedGroup::z(), s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let d = invariant_diameter(&a, 1.0, 5, 4, &mut rng).unwrap();
        assert!((d.value - 2.5).abs() < 1e-12);
    }

    use rand::SeedableRng;
}
