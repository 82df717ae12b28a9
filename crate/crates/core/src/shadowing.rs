//! Pseudo-orbits, tracing, expansivity and the stability conjugacy.
//!
//! Toral systems are handled in continuous coordinates on `R²/Z²`. A tracing
//! orbit of a hyperbolic matrix is built by splitting the step errors along
//! the eigenbasis: contracting components are summed forward from the left
//! edge of the window, expanding components backward from the right edge.
//! The result is an exact orbit of the linear recursion, so the tracing
//! bound holds on the window without any truncation error; truncation only
//! enters when two windows are compared.
//!
//! A single `f64` point cannot carry an orbit of a hyperbolic map across a
//! long window (rounding grows like `λ_u^k`), so tracing results keep the
//! whole traced orbit and are verified step by step.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{ActionMode, FiniteAction};
use crate::error::{domain, precondition, refused, violated, Result};
use crate::group::{Element, GeneratedGroup, GroupKind, Homomorphism};
use crate::linalg::{abs, hypot, mat_vec, powf, sqrt, torus_dist, wrap_centered, wrap_unit, Eigen2, IntMatrix2};
use crate::metric::{MetricSpace, PointMap};

/// Eigenvalues closer than this to the unit circle are not hyperbolic.
pub const HYPERBOLICITY_GAP: f64 = 1e-6;

/// Tolerance for the step-by-step check of a traced orbit.
pub const ORBIT_CONSISTENCY_TOL: f64 = 1e-9;

/// Diameter of the flat torus.
pub const TORUS_DIAMETER: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// `Z` or `Z²` acting on `R²/Z²` by integer matrices, evaluated exactly in
/// continuous coordinates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ToralSystem {
    group: GeneratedGroup,
    matrices: Vec<IntMatrix2>,
}

impl ToralSystem {
    pub fn new(group: GeneratedGroup, matrices: Vec<IntMatrix2>) -> Result<Self> {
        match (group.kind(), matrices.len()) {
            (GroupKind::Z, 1) => {}
            (GroupKind::Z2, 2) => {
                if !matrices[0].commutes_with(&matrices[1]) {
                    return Err(domain!("Z² generators must commute"));
                }
            }
            (k, n) => return Err(domain!("{n} matrices do not define a toral action of {k:?}")),
        }
        if matrices.iter().any(|m| m.det() == 0) {
            return Err(domain!("singular matrices are not supported"));
        }
        Ok(ToralSystem { group, matrices })
    }

    pub fn z(a: IntMatrix2) -> Result<Self> {
        Self::new(GeneratedGroup::z(), vec![a])
    }

    pub fn z2(a: IntMatrix2, b: IntMatrix2) -> Result<Self> {
        Self::new(GeneratedGroup::z2(), vec![a, b])
    }

    pub fn group(&self) -> &GeneratedGroup {
        &self.group
    }

    pub fn matrices(&self) -> &[IntMatrix2] {
        &self.matrices
    }

    pub fn mode(&self) -> ActionMode {
        if self.matrices.iter().all(IntMatrix2::is_unimodular) {
            ActionMode::Group
        } else {
            ActionMode::Semigroup
        }
    }

    pub fn can_evaluate(&self, g: &Element) -> bool {
        self.group.contains(g) && (self.mode() == ActionMode::Group || !g.has_negative_exponent())
    }

    /// `α_s` for generator `s`.
    pub fn step(&self, s: usize, p: [f64; 2]) -> [f64; 2] {
        self.matrices[s].apply_torus(p)
    }

    /// `α_g(p)`, iterating generators (or their inverses in group mode).
    pub fn apply(&self, g: &Element, p: [f64; 2]) -> Result<[f64; 2]> {
        if !self.can_evaluate(g) {
            return Err(domain!("{g} cannot be evaluated by this toral action"));
        }
        let mut q = p;
        for (gen, exp) in g.letters().into_iter().rev() {
            let m = if exp >= 0 { self.matrices[gen] } else { self.matrices[gen].inverse().expect("unimodular") };
            for _ in 0..exp.unsigned_abs() {
                q = m.apply_torus(q);
            }
        }
        Ok(q)
    }

    fn largest_norm(&self) -> f64 {
        self.matrices.iter().map(IntMatrix2::operator_norm).fold(0.0, f64::max)
    }
}

/// A `(δ, S)` pseudo-orbit indexed by a finite window of the group.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PseudoOrbit {
    pub window: Vec<Element>,
    /// One point of `R²/Z²` per window element, in `[0, 1)²`.
    pub values: Vec<[f64; 2]>,
    pub delta: f64,
    /// Indices of the generators in `S`.
    pub gen_set: Vec<usize>,
    /// Largest observed `d(α_s(x_g), x_{sg})`.
    pub defect: f64,
}

impl PseudoOrbit {
    /// Wraps given values after validating the window and measuring the
    /// step defect against `delta`.
    pub fn new(
        system: &ToralSystem,
        window: Vec<Element>,
        values: Vec<[f64; 2]>,
        delta: f64,
        gen_set: Vec<usize>,
    ) -> Result<Self> {
        if window.len() != values.len() {
            return Err(domain!("{} values for a window of {} elements", values.len(), window.len()));
        }
        let steps = window_steps(system.group(), &window, &gen_set)?;
        let values: Vec<[f64; 2]> = values.into_iter().map(|p| [wrap_unit(p[0]), wrap_unit(p[1])]).collect();
        let defect = step_defect(system, &values, &steps);
        if !(delta >= 0.0) {
            return Err(domain!("δ must be non-negative"));
        }
        let ok = if delta > 0.0 { defect < delta } else { defect <= ORBIT_CONSISTENCY_TOL };
        if !ok {
            return Err(precondition!("pseudo-orbit step defect {defect} is not below δ = {delta}"));
        }
        Ok(PseudoOrbit { window, values, delta, gen_set, defect })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, g: &Element) -> Option<[f64; 2]> {
        self.window.iter().position(|w| w == g).map(|i| self.values[i])
    }
}

/// `(g, s, sg)` index triples of all generator steps that stay inside the
/// window. The window must contain `e` and be connected by such steps.
fn window_steps(group: &GeneratedGroup, window: &[Element], gens: &[usize]) -> Result<Vec<(usize, usize, usize)>> {
    if gens.is_empty() || gens.iter().any(|&s| s >= group.rank()) {
        return Err(domain!("generator set must be a non-empty set of generator indices"));
    }
    let mut index = BTreeMap::new();
    for (i, g) in window.iter().enumerate() {
        if !group.contains(g) {
            return Err(domain!("{g} is not a group element"));
        }
        if index.insert(g.clone(), i).is_some() {
            return Err(domain!("{g} appears twice in the window"));
        }
    }
    let e = group.identity();
    let root = *index.get(&e).ok_or_else(|| domain!("window does not contain the identity"))?;
    let mut steps = Vec::new();
    let mut adj = vec![Vec::new(); window.len()];
    for (i, g) in window.iter().enumerate() {
        for &s in gens {
            let sg = group.multiply(&group.generator(s), g)?;
            if let Some(&j) = index.get(&sg) {
                steps.push((i, s, j));
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut seen = vec![false; window.len()];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(bad) = seen.iter().position(|s| !s) {
        return Err(domain!("window is not closed under partial S-multiplication at {}", window[bad]));
    }
    Ok(steps)
}

fn step_defect(system: &ToralSystem, values: &[[f64; 2]], steps: &[(usize, usize, usize)]) -> f64 {
    steps.iter().map(|&(g, s, sg)| torus_dist(system.step(s, values[g]), values[sg])).fold(0.0, f64::max)
}

/// Point of the open disc of radius `r`, uniform in area.
fn disc_sample(rng: &mut ChaCha8Rng, r: f64) -> [f64; 2] {
    let rho = r * sqrt(rng.gen::<f64>()) * (1.0 - 1e-12);
    let theta = 2.0 * PI * rng.gen::<f64>();
    [rho * libm::cos(theta), rho * libm::sin(theta)]
}

fn add(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [wrap_unit(p[0] + q[0]), wrap_unit(p[1] + q[1])]
}

/// The ball of radius `r` of `Z` as a window `[-r, r]`.
pub fn z_window(r: i64) -> Vec<Element> {
    (-r..=r).map(Element::Z).collect()
}

/// A seeded pseudo-orbit: a true orbit of a random point plus perturbations
/// of norm below `δ`.
///
/// On an interval of `Z` the orbit is grown from the left edge with one
/// perturbation per step. On other windows each value is perturbed
/// independently with norm below `δ / (1 + max‖A_s‖)`, which keeps every
/// step below `δ`. `δ = 0` gives the true orbit.
pub fn make_pseudo_orbit(
    system: &ToralSystem,
    delta: f64,
    gen_set: &[usize],
    window: Vec<Element>,
    seed: u64,
) -> Result<PseudoOrbit> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(domain!("δ must be finite and non-negative"));
    }
    window_steps(system.group(), &window, gen_set)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = [rng.gen::<f64>(), rng.gen::<f64>()];
    let values = match z_interval(&window) {
        Some((lo, _)) if system.group().kind() == GroupKind::Z => {
            let mut by_k: BTreeMap<i64, [f64; 2]> = BTreeMap::new();
            let mut x = start;
            let mut ks: Vec<i64> = window.iter().map(z_value).collect();
            ks.sort_unstable();
            debug_assert_eq!(ks[0], lo);
            for (n, &k) in ks.iter().enumerate() {
                if n > 0 {
                    x = add(system.step(0, x), disc_sample(&mut rng, delta));
                }
                by_k.insert(k, x);
            }
            window.iter().map(|g| by_k[&z_value(g)]).collect()
        }
        _ => {
            let r = delta / (1.0 + system.largest_norm());
            window
                .iter()
                .map(|g| Ok(add(system.apply(g, start)?, disc_sample(&mut rng, r))))
                .collect::<Result<Vec<_>>>()?
        }
    };
    PseudoOrbit::new(system, window, values, delta, gen_set.to_vec())
}

fn z_value(g: &Element) -> i64 {
    match g {
        Element::Z(k) => *k,
        _ => i64::MIN,
    }
}

/// `(lo, hi)` when the window is exactly `{lo, …, hi}` in `Z`.
fn z_interval(window: &[Element]) -> Option<(i64, i64)> {
    if window.iter().any(|g| !matches!(g, Element::Z(_))) || window.is_empty() {
        return None;
    }
    let ks: Vec<i64> = window.iter().map(z_value).collect();
    let lo = *ks.iter().min()?;
    let hi = *ks.iter().max()?;
    ((hi - lo + 1) as usize == ks.len()).then_some((lo, hi))
}

/// A point whose orbit stays close to a pseudo-orbit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TracingResult {
    pub point: [f64; 2],
    /// `max_g d(α_g(point), x_g)` in the torus metric.
    pub epsilon: f64,
    pub window: Vec<Element>,
    /// No second tracer was found by the uniqueness scan.
    pub unique: bool,
    /// The traced orbit over the window, in window order.
    pub orbit: Vec<[f64; 2]>,
    /// Tracing distance in the sup-norm of eigen-coordinates.
    pub epsilon_eigen: f64,
    /// Pseudo-orbit step error in the same norm.
    pub delta_eigen: f64,
    /// `C_A = max_j 1 / ||λ_j| − 1|`.
    pub constant: f64,
    /// `diam · max_j min(|λ_j|, 1/|λ_j|)^L` with `L` the distance from `e` to
    /// the nearer window edge.
    pub truncation: f64,
    /// Norm of the eigenbasis as a map from the sup-norm to the Euclidean norm.
    pub basis_norm: f64,
    /// `basis_norm · (C_A · δ_eigen + truncation)`.
    pub bound: f64,
}

impl TracingResult {
    /// Re-verifies the defining inequality: the stored orbit steps by the
    /// generators up to rounding, starts at `point`, and stays within
    /// `epsilon` of the pseudo-orbit.
    pub fn verify(&self, system: &ToralSystem, po: &PseudoOrbit) -> Result<f64> {
        if self.window != po.window || self.orbit.len() != po.values.len() {
            return Err(domain!("tracing result and pseudo-orbit use different windows"));
        }
        let steps = window_steps(system.group(), &po.window, &po.gen_set)?;
        let drift = step_defect(system, &self.orbit, &steps);
        if drift > ORBIT_CONSISTENCY_TOL {
            return Err(violated!("traced orbit drifts by {drift} in one step"));
        }
        let e = po.window.iter().position(|g| *g == system.group().identity()).expect("window holds e");
        if torus_dist(self.orbit[e], self.point) > ORBIT_CONSISTENCY_TOL {
            return Err(violated!("traced orbit does not pass through the tracing point"));
        }
        let eps = self.orbit.iter().zip(&po.values).map(|(z, x)| torus_dist(*z, *x)).fold(0.0, f64::max);
        if eps > self.epsilon + ORBIT_CONSISTENCY_TOL {
            return Err(violated!("recomputed tracing distance {eps} exceeds the reported {}", self.epsilon));
        }
        Ok(eps)
    }
}

/// Eigen data of a hyperbolic matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperbolicity {
    pub eigen: Eigen2,
    /// `C_A`.
    pub constant: f64,
    /// `max_j min(|λ_j|, 1/|λ_j|)`: per-step decay of the series terms.
    pub rate: f64,
    pub basis_norm: f64,
}

impl Hyperbolicity {
    pub fn of(a: &IntMatrix2) -> Result<Self> {
        let eigen = Eigen2::of(a).map_err(|_| refused!("{:?} has no real eigenbasis; not hyperbolic", a.0))?;
        for l in eigen.values {
            if abs(abs(l) - 1.0) < HYPERBOLICITY_GAP {
                return Err(refused!("eigenvalue {l} lies on the unit circle; not hyperbolic"));
            }
        }
        let constant = eigen.values.iter().map(|l| 1.0 / abs(abs(*l) - 1.0)).fold(0.0, f64::max);
        let rate = eigen.values.iter().map(|l| abs(*l).min(1.0 / abs(*l))).fold(0.0, f64::max);
        let v = eigen.vectors;
        let plus = hypot(v[0][0] + v[0][1], v[1][0] + v[1][1]);
        let minus = hypot(v[0][0] - v[0][1], v[1][0] - v[1][1]);
        Ok(Hyperbolicity { eigen, constant, rate, basis_norm: plus.max(minus) })
    }

    /// `diam · rate^L`.
    pub fn truncation(&self, l: i64) -> f64 {
        TORUS_DIAMETER * powf(self.rate, l.max(0) as f64)
    }
}

/// Correction `w_k` in eigen-coordinates solving `w_{k+1} = Λ w_k − c_k` on
/// `k = 0..n`, with contracting components zero at the left edge and
/// expanding components zero at the right edge.
fn series_corrections(values: &[f64; 2], errors: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let n = errors.len() + 1;
    let mut w = vec![[0.0f64; 2]; n];
    for j in 0..2 {
        let l = values[j];
        if abs(l) < 1.0 {
            for k in 0..n - 1 {
                w[k + 1][j] = l * w[k][j] - errors[k][j];
            }
        } else {
            for k in (0..n - 1).rev() {
                w[k][j] = (w[k + 1][j] + errors[k][j]) / l;
            }
        }
    }
    w
}

/// Step errors `wrap(x_{k+1} − A x_k)` along an ordered `Z` orbit.
pub fn step_errors(a: &IntMatrix2, ordered: &[[f64; 2]]) -> Vec<[f64; 2]> {
    ordered
        .windows(2)
        .map(|p| {
            let ax = a.apply_real(p[0]);
            [wrap_centered(p[1][0] - ax[0]), wrap_centered(p[1][1] - ax[1])]
        })
        .collect()
}

/// Corrections `w_k` (Euclidean coordinates) turning an ordered pseudo-orbit
/// into an exact orbit; exposed for comparison with other solvers.
pub fn tracing_corrections(a: &IntMatrix2, ordered: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    let hyp = Hyperbolicity::of(a)?;
    let errors: Vec<[f64; 2]> = step_errors(a, ordered).into_iter().map(|e| hyp.eigen.to_eigen(e)).collect();
    Ok(series_corrections(&hyp.eigen.values, &errors).into_iter().map(|w| hyp.eigen.from_eigen(w)).collect())
}

/// Explicit shadowing for a hyperbolic toral automorphism on an interval of
/// `Z` containing `0`.
pub fn shadow_hyperbolic_toral(po: &PseudoOrbit, a: &IntMatrix2) -> Result<TracingResult> {
    let (lo, hi) = z_interval(&po.window).ok_or_else(|| domain!("window must be an interval of Z"))?;
    if lo > 0 || hi < 0 {
        return Err(domain!("window must contain 0"));
    }
    let hyp = Hyperbolicity::of(a)?;
    let mut order: Vec<usize> = (0..po.len()).collect();
    order.sort_by_key(|&i| z_value(&po.window[i]));
    let ordered: Vec<[f64; 2]> = order.iter().map(|&i| po.values[i]).collect();
    let errors: Vec<[f64; 2]> = step_errors(a, &ordered).into_iter().map(|e| hyp.eigen.to_eigen(e)).collect();
    let delta_eigen = errors.iter().map(|c| abs(c[0]).max(abs(c[1]))).fold(0.0, f64::max);
    let w = series_corrections(&hyp.eigen.values, &errors);
    let epsilon_eigen = w.iter().map(|c| abs(c[0]).max(abs(c[1]))).fold(0.0, f64::max);

    let mut orbit = vec![[0.0; 2]; po.len()];
    let mut epsilon = 0.0f64;
    for (pos, &i) in order.iter().enumerate() {
        let z = add(ordered[pos], hyp.eigen.from_eigen(w[pos]));
        epsilon = epsilon.max(torus_dist(z, ordered[pos]));
        orbit[i] = z;
    }
    let truncation = hyp.truncation((-lo).min(hi));
    let eigen_bound = hyp.constant * delta_eigen + truncation;
    if epsilon_eigen > eigen_bound * (1.0 + 1e-12) + 1e-15 {
        return Err(violated!("tracing distance {epsilon_eigen} exceeds C·δ + truncation = {eigen_bound}"));
    }
    let bound = hyp.basis_norm * eigen_bound;
    let centre = (-lo) as usize;
    let unique = uniqueness_scan(a, &ordered, &w, &hyp, centre, epsilon.max(po.delta));
    Ok(TracingResult {
        point: orbit[order[centre]],
        epsilon,
        window: po.window.clone(),
        unique,
        orbit,
        epsilon_eigen,
        delta_eigen,
        constant: hyp.constant,
        truncation,
        basis_norm: hyp.basis_norm,
        bound,
    })
}

/// Scans a `21 × 21` grid of radius `2·scale` around the tracer for a second
/// point whose orbit stays within the tracing distance of the pseudo-orbit.
/// Orbits of offsets are linear, so they are iterated without wrapping.
fn uniqueness_scan(
    a: &IntMatrix2,
    ordered: &[[f64; 2]],
    w: &[[f64; 2]],
    hyp: &Hyperbolicity,
    centre: usize,
    scale: f64,
) -> bool {
    let lift: Vec<[f64; 2]> = w.iter().map(|c| hyp.eigen.from_eigen(*c)).collect();
    let eps = lift.iter().map(|v| hypot(v[0], v[1])).fold(0.0, f64::max);
    let radius = 2.0 * scale.max(1e-12);
    let step = radius / 10.0;
    let fwd = a.0.map(|r| r.map(|x| x as f64));
    let det = a.det() as f64;
    let [[p, q], [r, s]] = fwd;
    let back = [[s / det, -q / det], [-r / det, p / det]];
    for i in -10i32..=10 {
        for j in -10i32..=10 {
            if i == 0 && j == 0 {
                continue;
            }
            let d0 = [i as f64 * step, j as f64 * step];
            let mut worst = 0.0f64;
            let mut d = d0;
            for k in centre..ordered.len() {
                if k > centre {
                    d = mat_vec(&fwd, d);
                }
                worst = worst.max(hypot(lift[k][0] + d[0], lift[k][1] + d[1]));
                if worst > eps {
                    break;
                }
            }
            let mut d = d0;
            for k in (0..centre).rev() {
                if worst > eps {
                    break;
                }
                d = mat_vec(&back, d);
                worst = worst.max(hypot(lift[k][0] + d[0], lift[k][1] + d[1]));
            }
            if worst <= eps {
                return false;
            }
        }
    }
    true
}

/// Tracer of a pseudo-orbit of a finite action found by trying every point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteTracing {
    pub point: usize,
    pub epsilon: f64,
    pub unique: bool,
    /// Points tying with the chosen one; the smallest index wins.
    pub ties: Vec<usize>,
}

/// Exhaustive tracing on a finite space: the point minimising
/// `max_g d(α_g x, x_g)` over the window.
pub fn trace_exhaustive<S: MetricSpace>(
    alpha: &FiniteAction<S>,
    window: &[Element],
    values: &[usize],
) -> Result<FiniteTracing> {
    if window.len() != values.len() {
        return Err(domain!("{} values for a window of {} elements", values.len(), window.len()));
    }
    let maps = window.iter().map(|g| alpha.map_of(g)).collect::<Result<Vec<_>>>()?;
    trace_with_maps(alpha.space(), &maps, values)
}

fn trace_with_maps<S: MetricSpace + ?Sized>(space: &S, maps: &[PointMap], values: &[usize]) -> Result<FiniteTracing> {
    let n = space.len();
    if values.iter().any(|&v| v >= n) {
        return Err(domain!("pseudo-orbit value outside the space"));
    }
    let mut best = f64::INFINITY;
    let mut ties = Vec::new();
    for x in 0..n {
        let mut err = 0.0f64;
        for (m, &v) in maps.iter().zip(values) {
            err = err.max(space.dist(m.apply(x), v));
            if err > best + 1e-12 {
                break;
            }
        }
        if err < best - 1e-12 {
            best = err;
            ties.clear();
            ties.push(x);
        } else if err <= best + 1e-12 {
            ties.push(x);
        }
    }
    Ok(FiniteTracing { point: ties[0], epsilon: best, unique: ties.len() == 1, ties })
}

/// Outcome of an expansivity check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansivityReport {
    pub expansive: bool,
    /// A sampled pair whose orbits never separate by more than `c`.
    pub witness: Option<(usize, usize)>,
    /// Smallest `sup_g d(α_g x, α_g y)` over the sampled pairs.
    pub min_separation: f64,
    pub constant: f64,
    pub horizon: usize,
    pub pairs_checked: usize,
    pub note: String,
}

/// Checks `sup_{g ∈ ball(R)} d(α_g x, α_g y) > c` for every sampled pair.
/// A positive answer is certified only for those pairs and that horizon.
pub fn expansivity_certificate<S: MetricSpace>(
    alpha: &FiniteAction<S>,
    c: f64,
    horizon: usize,
    pairs: &[(usize, usize)],
) -> Result<ExpansivityReport> {
    if !(c > 0.0) {
        return Err(domain!("expansive constant must be positive"));
    }
    let n = alpha.space().len();
    let maps = alpha.ball_maps(horizon)?;
    let mut min_sep = f64::INFINITY;
    let mut witness = None;
    let mut checked = 0;
    for &(x, y) in pairs {
        if x >= n || y >= n {
            return Err(domain!("pair ({x}, {y}) outside the space"));
        }
        if x == y {
            continue;
        }
        checked += 1;
        let sep = maps.iter().map(|(_, m)| alpha.space().dist(m.apply(x), m.apply(y))).fold(0.0, f64::max);
        if sep < min_sep {
            min_sep = sep;
        }
        if sep <= c && witness.is_none() {
            witness = Some((x, y));
        }
    }
    Ok(ExpansivityReport {
        expansive: witness.is_none(),
        witness,
        min_separation: min_sep,
        constant: c,
        horizon,
        pairs_checked: checked,
        note: alloc::format!("certified for {checked} sampled pairs up to horizon {horizon}"),
    })
}

/// `count` distinct unordered pairs of distinct points, seeded; all pairs
/// when there are at most `count`.
pub fn sample_pairs(len: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = len * len.saturating_sub(1) / 2;
    if total <= count {
        return (0..len).flat_map(|x| (x + 1..len).map(move |y| (x, y))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = alloc::collections::BTreeSet::new();
    while seen.len() < count {
        let x = rng.gen_range(0..len);
        let y = rng.gen_range(0..len);
        if x != y {
            seen.insert((x.min(y), x.max(y)));
        }
    }
    seen.into_iter().collect()
}

/// A ball `F = ball(r)` of the acting group.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeparationSet {
    pub radius: usize,
    pub elements: Vec<Element>,
}

/// Smallest `r ≤ R` such that every sampled `y` with
/// `sup_{g ∈ ball(r)} d(α_g x, α_g y) ≤ c` has `d(x, y) < ε`.
pub fn separation_set<S: MetricSpace>(
    alpha: &FiniteAction<S>,
    x: usize,
    epsilon: f64,
    c: f64,
    horizon: usize,
    samples: &[usize],
) -> Result<SeparationSet> {
    if !(c > 0.0) || !(epsilon > 0.0) {
        return Err(domain!("ε and c must be positive"));
    }
    let n = alpha.space().len();
    if x >= n || samples.iter().any(|&y| y >= n) {
        return Err(domain!("sample outside the space"));
    }
    let maps = alpha.ball_maps(horizon)?;
    let group = alpha.group();
    let space = alpha.space();
    let mut sep = vec![0.0f64; samples.len()];
    let mut best = (usize::MAX, 0usize);
    for r in 0..=horizon {
        for (g, m) in maps.iter().filter(|(g, _)| group.word_length(g) == r) {
            let _ = g;
            let gx = m.apply(x);
            for (s, &y) in sep.iter_mut().zip(samples) {
                *s = s.max(space.dist(gx, m.apply(y)));
            }
        }
        let failures = samples.iter().zip(&sep).filter(|(&y, &s)| s <= c && space.dist(x, y) >= epsilon).count();
        if failures == 0 {
            let elements = maps.iter().filter(|(g, _)| group.word_length(g) <= r).map(|(g, _)| g.clone()).collect();
            return Ok(SeparationSet { radius: r, elements });
        }
        if failures < best.0 {
            best = (failures, r);
        }
    }
    Err(refused!("horizon {horizon} exhausted; best radius {} still has {} failures", best.1, best.0))
}

/// Settings for the toral conjugacy construction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjugacyConfig {
    /// Pseudo-orbits use the window `[-N, N]`.
    pub window: i64,
    /// Equivariance is checked on `[-R, R]`.
    pub equivariance_radius: i64,
    /// Pseudo-orbit bound `δ` required of `u`.
    pub delta: f64,
    /// Number of points whose tracer gets a uniqueness scan.
    pub uniqueness_samples: usize,
}

impl Default for ConjugacyConfig {
    fn default() -> Self {
        ConjugacyConfig { window: 25, equivariance_radius: 3, delta: 1e-2, uniqueness_samples: 16 }
    }
}

/// The conjugacy `h` together with its measured properties.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjugacyResult {
    /// `h(y)` in `[0, 1)²`.
    pub h: Vec<[f64; 2]>,
    /// Largest tracing distance `ε₁` over all points.
    pub epsilon1: f64,
    /// `ε₁` in eigen-coordinates.
    pub epsilon1_eigen: f64,
    /// `sup_y d(h(y), u(y))`.
    pub sup_to_u: f64,
    /// Largest pseudo-orbit step defect of `u`.
    pub delta_measured: f64,
    /// Isometry defect of `u`: max of distortion and net defect on the grid.
    pub u_isometry: f64,
    /// The same for `h`.
    pub h_isometry: f64,
    /// `2ε₁ + u_isometry`.
    pub isometry_bound: f64,
    /// `max_{|t| ≤ R} d_sup(α_t ∘ h, h ∘ β_{ρ(t)})`.
    pub equivariance_defect: f64,
    /// Window truncation bound on the equivariance defect, plus rounding.
    pub tolerance: f64,
    /// Points whose tracer failed the uniqueness scan.
    pub non_unique: Vec<usize>,
    pub window: i64,
    pub equivariance_radius: i64,
}

/// Builds `h: Y → T²` by tracing the pseudo-orbits `t ↦ u(β_{ρ(t)} y)` of a
/// hyperbolic `Z` action on the torus.
///
/// `u` gives one torus point per point of `Y`; `grid` is the set of torus
/// points used for the net part of the isometry defects.
pub fn build_conjugacy<Y: MetricSpace>(
    u: &[[f64; 2]],
    rho: &Homomorphism,
    alpha: &ToralSystem,
    beta: &FiniteAction<Y>,
    grid: &[[f64; 2]],
    config: &ConjugacyConfig,
) -> Result<ConjugacyResult> {
    let ny = beta.space().len();
    if u.len() != ny {
        return Err(domain!("u has {} values for {ny} points", u.len()));
    }
    if alpha.group().kind() != GroupKind::Z {
        return Err(refused!("toral conjugacy is built for Z actions"));
    }
    if rho.source() != alpha.group() || rho.target() != beta.group() {
        return Err(domain!("ρ must map the group of α to the group of β"));
    }
    if config.window < 1 || config.equivariance_radius < 0 || config.equivariance_radius >= config.window {
        return Err(domain!("need 0 ≤ R < N"));
    }
    let a = alpha.matrices()[0];
    let hyp = Hyperbolicity::of(&a)?;
    let n = config.window;
    let one = rho.apply(&Element::Z(1))?;
    let fwd = beta.map_of(&one)?;
    let back = beta.map_of(&beta.group().inverse(&one).ok_or_else(|| domain!("β needs inverses"))?)?;
    if alpha.mode() != ActionMode::Group {
        return Err(refused!("α must be invertible for two-sided windows"));
    }

    let len = (2 * n + 1) as usize;
    let mut h = vec![[0.0; 2]; ny];
    let mut eps1 = 0.0f64;
    let mut eps1_eig = 0.0f64;
    let mut delta = 0.0f64;
    let mut non_unique = Vec::new();
    let mut track = vec![0usize; len];
    let mut ordered = vec![[0.0; 2]; len];
    for y in 0..ny {
        track[n as usize] = y;
        for k in n as usize + 1..len {
            track[k] = fwd.apply(track[k - 1]);
        }
        for k in (0..n as usize).rev() {
            track[k] = back.apply(track[k + 1]);
        }
        for k in 0..len {
            ordered[k] = u[track[k]];
        }
        let errors: Vec<[f64; 2]> = step_errors(&a, &ordered).into_iter().map(|e| hyp.eigen.to_eigen(e)).collect();
        delta = errors
            .iter()
            .map(|c| hypot(hyp.eigen.from_eigen(*c)[0], hyp.eigen.from_eigen(*c)[1]))
            .fold(delta, f64::max);
        let w = series_corrections(&hyp.eigen.values, &errors);
        for (k, c) in w.iter().enumerate() {
            let lift = hyp.eigen.from_eigen(*c);
            eps1 = eps1.max(hypot(lift[0], lift[1]).min(torus_dist(add(ordered[k], lift), ordered[k])));
            eps1_eig = eps1_eig.max(abs(c[0]).max(abs(c[1])));
        }
        h[y] = add(ordered[n as usize], hyp.eigen.from_eigen(w[n as usize]));
        if y < config.uniqueness_samples && !uniqueness_scan(&a, &ordered, &w, &hyp, n as usize, eps1.max(config.delta))
        {
            non_unique.push(y);
        }
    }
    let ok = if config.delta > 0.0 { delta < config.delta } else { delta <= ORBIT_CONSISTENCY_TOL };
    if !ok {
        return Err(precondition!("pseudo-orbits of u have step defect {delta}, not below δ = {}", config.delta));
    }

    let sup_to_u = h.iter().zip(u).map(|(p, q)| torus_dist(*p, *q)).fold(0.0, f64::max);
    let u_isometry = torus_isometry_defect(beta.space(), u, grid);
    let h_isometry = torus_isometry_defect(beta.space(), &h, grid);
    let isometry_bound = 2.0 * eps1 + u_isometry;
    if sup_to_u > eps1 + ORBIT_CONSISTENCY_TOL {
        return Err(violated!("d_sup(h, u) = {sup_to_u} exceeds ε₁ = {eps1}"));
    }
    if h_isometry > isometry_bound + 1e-9 {
        return Err(violated!("h has isometry defect {h_isometry} above 2ε₁ + δ = {isometry_bound}"));
    }

    let r = config.equivariance_radius;
    let inv = a.inverse().expect("unimodular");
    let mut defect = 0.0f64;
    for y in 0..ny {
        for (m, step) in [(a, &fwd), (inv, &back)] {
            let mut p = h[y];
            let mut z = y;
            for _ in 0..r {
                p = m.apply_torus(p);
                z = step.apply(z);
                defect = defect.max(torus_dist(p, h[z]));
            }
        }
    }
    let rounding = 64.0 * f64::EPSILON * powf(1.0 + a.operator_norm(), r as f64);
    let tolerance = 2.0 * hyp.basis_norm * eps1_eig * powf(hyp.rate, (n - r) as f64) + rounding;
    if defect > tolerance {
        return Err(violated!("equivariance defect {defect} above the truncation bound {tolerance}"));
    }
    Ok(ConjugacyResult {
        h,
        epsilon1: eps1,
        epsilon1_eigen: eps1_eig,
        sup_to_u,
        delta_measured: delta,
        u_isometry,
        h_isometry,
        isometry_bound,
        equivariance_defect: defect,
        tolerance,
        non_unique,
        window: n,
        equivariance_radius: r,
    })
}

/// `max(distortion, net defect)` of a map from `Y` into the torus, with the
/// net part measured against `grid`.
pub fn torus_isometry_defect<Y: MetricSpace + ?Sized>(y: &Y, image: &[[f64; 2]], grid: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let mut dis = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            dis = dis.max(abs(y.dist(i, j) - torus_dist(image[i], image[j])));
        }
    }
    let net =
        grid.iter().map(|g| image.iter().map(|p| torus_dist(*g, *p)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    dis.max(net)
}

/// Adds seeded noise of norm at most `amplitude` to every point.
pub fn perturb_points(points: &[[f64; 2]], amplitude: f64, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points.iter().map(|p| add(*p, disc_sample(&mut rng, amplitude))).collect()
}

/// Conjugacy on finite spaces by exhaustive tracing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteConjugacy {
    pub h: PointMap,
    pub epsilon1: f64,
    pub sup_to_u: f64,
    /// `max_{t} d_sup(α_t ∘ h, h ∘ β_{ρ(t)})` over the window.
    pub equivariance_defect: f64,
    /// Points with tied tracers; the smallest index was used.
    pub non_unique: Vec<usize>,
}

/// `build_conjugacy` for actions on finite spaces: `h(y)` is the exhaustive
/// tracer of `t ↦ u(β_{ρ(t)} y)` over `ball(radius)`.
pub fn build_conjugacy_finite<X: MetricSpace, Y: MetricSpace>(
    u: &PointMap,
    rho: &Homomorphism,
    alpha: &FiniteAction<X>,
    beta: &FiniteAction<Y>,
    radius: usize,
) -> Result<FiniteConjugacy> {
    let (nx, ny) = (alpha.space().len(), beta.space().len());
    if u.source_len() != ny || u.target_len() != nx {
        return Err(domain!("u must map the space of β to the space of α"));
    }
    if rho.source() != alpha.group() || rho.target() != beta.group() {
        return Err(domain!("ρ must map the group of α to the group of β"));
    }
    let window: Vec<Element> = alpha
        .group()
        .ball(radius, alpha.mode() == ActionMode::Semigroup)?
        .into_iter()
        .filter(|t| rho.apply(t).map(|g| beta.can_evaluate(&g)).unwrap_or(false))
        .collect();
    let amaps = window.iter().map(|t| alpha.map_of(t)).collect::<Result<Vec<_>>>()?;
    let bmaps = window.iter().map(|t| beta.map_of(&rho.apply(t)?)).collect::<Result<Vec<_>>>()?;
    let mut image = Vec::with_capacity(ny);
    let mut eps1 = 0.0f64;
    let mut non_unique = Vec::new();
    for y in 0..ny {
        let values: Vec<usize> = bmaps.iter().map(|m| u.apply(m.apply(y))).collect();
        let tr = trace_with_maps(alpha.space(), &amaps, &values)?;
        if !tr.unique {
            non_unique.push(y);
        }
        eps1 = eps1.max(tr.epsilon);
        image.push(tr.point);
    }
    let h = PointMap::new(ny, nx, image)?;
    let sup_to_u = crate::action::d_sup(alpha.space(), &h, u)?;
    let mut defect = 0.0f64;
    for (am, bm) in amaps.iter().zip(&bmaps) {
        defect = defect.max(crate::action::d_sup(alpha.space(), &h.then(am)?, &bm.then(&h)?)?);
    }
    Ok(FiniteConjugacy { h, epsilon1: eps1, sup_to_u, equivariance_defect: defect, non_unique })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{full_shift, toral_matrix_action, ShiftSpace, TorusGrid};

    const CAT: IntMatrix2 = IntMatrix2([[2, 1], [1, 1]]);

    fn cat() -> ToralSystem {
        ToralSystem::z(CAT).unwrap()
    }

    #[test]
    fn true_orbit_is_traced_by_its_start() {
        let po = make_pseudo_orbit(&cat(), 0.0, &[0], z_window(10), 3).unwrap();
        let tr = shadow_hyperbolic_toral(&po, &CAT).unwrap();
        assert!(tr.epsilon < 1e-12);
        assert!(torus_dist(tr.point, po.value_at(&Element::Z(0)).unwrap()) < 1e-12);
        tr.verify(&cat(), &po).unwrap();
    }

    #[test]
    fn single_point_window() {
        let po = make_pseudo_orbit(&cat(), 1e-3, &[0], z_window(0), 1).unwrap();
        let tr = shadow_hyperbolic_toral(&po, &CAT).unwrap();
        assert_eq!(tr.epsilon, 0.0);
        assert_eq!(tr.point, po.values[0]);
    }

    #[test]
    fn cat_map_tracing_within_bound() {
        let po = make_pseudo_orbit(&cat(), 1e-3, &[0], z_window(50), 7).unwrap();
        assert!(po.defect < 1e-3);
        let tr = shadow_hyperbolic_toral(&po, &CAT).unwrap();
        assert!((tr.constant - 1.618033988749895).abs() < 1e-9);
        assert!(tr.epsilon_eigen <= tr.constant * tr.delta_eigen + tr.truncation);
        assert!(tr.epsilon <= tr.bound);
        assert!(tr.unique);
        tr.verify(&cat(), &po).unwrap();
    }

    #[test]
    fn ratio_is_linear_in_delta() {
        let r: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&d| {
                let po = make_pseudo_orbit(&cat(), d, &[0], z_window(50), 11).unwrap();
                shadow_hyperbolic_toral(&po, &CAT).unwrap().epsilon / d
            })
            .collect();
        assert!((r[0] / r[2] - 1.0).abs() < 0.05 && (r[1] / r[2] - 1.0).abs() < 0.05);
    }

    #[test]
    fn non_hyperbolic_refused() {
        let shear = IntMatrix2([[1, 1], [0, 1]]);
        let sys = ToralSystem::z(shear).unwrap();
        let po = make_pseudo_orbit(&sys, 1e-3, &[0], z_window(3), 0).unwrap();
        assert!(matches!(shadow_hyperbolic_toral(&po, &shear), Err(crate::Error::Refused(_))));
    }

    #[test]
    fn z2_pseudo_orbit() {
        let sys = ToralSystem::z2(IntMatrix2([[1, 3], [2, 4]]), IntMatrix2([[-3, 3], [2, 0]])).unwrap();
        let window = GeneratedGroup::z2().ball(5, true).unwrap();
        let po = make_pseudo_orbit(&sys, 1e-3, &[0, 1], window, 5).unwrap();
        assert!(po.defect < 1e-3);
        let gapped = vec![Element::Z(0), Element::Z(2)];
        assert!(make_pseudo_orbit(&cat(), 1e-3, &[0], gapped, 0).is_err());
    }

    #[test]
    fn expansivity() {
        let g = TorusGrid::new(16).unwrap();
        let (act, _) = toral_matrix_action(&g, g.clone(), CAT).unwrap();
        let pairs = sample_pairs(g.len(), 300, 1);
        assert!(expansivity_certificate(&act, 0.1, 30, &pairs).unwrap().expansive);
        let id = FiniteAction::trivial(GeneratedGroup::z(), g.clone()).unwrap();
        let rep = expansivity_certificate(&id, 0.1, 5, &pairs).unwrap();
        assert!(!rep.expansive && rep.witness.is_some());
        let shift = full_shift(2, 6, 0).unwrap();
        let all = sample_pairs(64, 10_000, 0);
        assert!(expansivity_certificate(&shift.action, 0.5, 5, &all).unwrap().expansive);
    }

    #[test]
    fn separation_sets() {
        let shift = full_shift(2, 8, 0).unwrap();
        let all: Vec<usize> = (0..256).collect();
        let f = separation_set(&shift.action, 0b1011_0010, 0.125, 0.5, 7, &all).unwrap();
        assert_eq!(f.radius, 3);
        assert_eq!(f.elements.len(), 4);
        let whole = separation_set(&shift.action, 0, 1.5, 0.5, 7, &all).unwrap();
        assert_eq!(whole.elements, vec![Element::Z(0)]);
        let sp = ShiftSpace::new(2, 8).unwrap();
        assert_eq!(sp.dist(0, 1), 1.0 / 128.0);
    }

    #[test]
    fn identity_conjugacy() {
        let g = TorusGrid::new(6).unwrap();
        let (act, _) = toral_matrix_action(&g, g.clone(), CAT).unwrap();
        let rho = Homomorphism::identity(&GeneratedGroup::z());
        let c = build_conjugacy_finite(&PointMap::identity(36), &rho, &act, &act, 3).unwrap();
        assert!(c.h.is_identity());
        assert_eq!(c.equivariance_defect, 0.0);
    }

    #[test]
    fn toral_conjugacy_of_true_orbits() {
        let g = TorusGrid::new(8).unwrap();
        let (beta, _) = toral_matrix_action(&g, g.clone(), CAT).unwrap();
        let u: Vec<[f64; 2]> = (0..g.len()).map(|p| g.coords(p)).collect();
        let rho = Homomorphism::identity(&GeneratedGroup::z());
        let cfg = ConjugacyConfig { delta: 1e-3, ..ConjugacyConfig::default() };
        let c = build_conjugacy(&u, &rho, &cat(), &beta, &u, &cfg).unwrap();
        assert!(c.equivariance_defect <= 1e-9);
        assert!(c.sup_to_u < 1e-12);
        let noisy = perturb_points(&u, 1e-4, 2);
        let cfg = ConjugacyConfig { delta: 1e-3, ..ConjugacyConfig::default() };
        let c = build_conjugacy(&noisy, &rho, &cat(), &beta, &u, &cfg).unwrap();
        assert!(c.equivariance_defect <= c.tolerance);
        assert!(c.sup_to_u <= c.epsilon1 + 1e-12);
    }
}
