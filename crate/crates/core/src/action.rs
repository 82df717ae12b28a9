//! Actions of generated groups on finite metric spaces and the equivariant
//! Gromov-Hausdorff distances between them.
//!
//! All distances here are certified upper bounds produced by search; none of
//! them is claimed to be the infimum in the definition.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::group::{enumerate_homomorphisms, Element, GeneratedGroup, Homomorphism};
use crate::metric::{distortion_unchecked, greedy_seeds, net_defect_unchecked, MetricSpace, PointMap, SearchConfig};
use crate::search::local_search;
use crate::BOUND_TOL;

/// Default word-length radius for the sup over group elements.
pub const DEFAULT_BALL_RADIUS: usize = 6;

/// Label attached to every value whose group sup was cut to a finite ball.
pub const BALL_TRUNCATED: &str = "ball-truncated";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ActionMode {
    /// Generator maps are bijections; inverses are available.
    Group,
    /// Only products of generators (non-negative exponents) are evaluated.
    Semigroup,
}

/// A group or monoid acting on a finite space through one map per generator.
#[derive(Debug, Clone)]
pub struct FiniteAction<S> {
    group: GeneratedGroup,
    space: S,
    generators: Vec<PointMap>,
    inverses: Option<Vec<PointMap>>,
    mode: ActionMode,
}

impl<S: MetricSpace> FiniteAction<S> {
    /// Builds the action and checks every defining relation exactly.
    pub fn new(group: GeneratedGroup, space: S, generators: Vec<PointMap>, mode: ActionMode) -> Result<Self> {
        let n = space.len();
        if generators.len() != group.rank() {
            return Err(domain!("{} generator maps for a group of rank {}", generators.len(), group.rank()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.source_len() != n || g.target_len() != n {
                return Err(domain!("generator {i} is not a self-map of the {n}-point space"));
            }
        }
        let inverses = match mode {
            ActionMode::Group => {
                if !group.is_group() {
                    return Err(domain!("a free monoid cannot act in group mode"));
                }
                let inv = generators
                    .iter()
                    .enumerate()
                    .map(|(i, g)| g.inverse().ok_or_else(|| domain!("generator {i} is not a bijection")))
                    .collect::<Result<Vec<_>>>()?;
                Some(inv)
            }
            ActionMode::Semigroup => None,
        };
        let action = FiniteAction { group, space, generators, inverses, mode };
        action.check_relations()?;
        Ok(action)
    }

    /// Group mode when every generator is a bijection and the group has
    /// inverses, semigroup mode otherwise.
    pub fn infer(group: GeneratedGroup, space: S, generators: Vec<PointMap>) -> Result<Self> {
        let mode = if group.is_group() && generators.iter().all(PointMap::is_bijection) {
            ActionMode::Group
        } else {
            ActionMode::Semigroup
        };
        Self::new(group, space, generators, mode)
    }

    /// Every generator acts as the identity.
    pub fn trivial(group: GeneratedGroup, space: S) -> Result<Self> {
        let id = PointMap::identity(space.len());
        let gens = alloc::vec![id; group.rank()];
        let mode = if group.is_group() { ActionMode::Group } else { ActionMode::Semigroup };
        Self::new(group, space, gens, mode)
    }

    fn check_relations(&self) -> Result<()> {
        use crate::group::GroupKind;
        match self.group.kind() {
            GroupKind::Z2 => {
                let st = self.generators[1].then(&self.generators[0])?;
                let ts = self.generators[0].then(&self.generators[1])?;
                if st != ts {
                    return Err(domain!("generator maps of Z² do not commute"));
                }
            }
            GroupKind::Cyclic(m) => {
                let mut acc = PointMap::identity(self.space.len());
                for _ in 0..m {
                    acc = acc.then(&self.generators[0])?;
                }
                if !acc.is_identity() {
                    return Err(domain!("generator map does not have order dividing {m}"));
                }
            }
            GroupKind::Z | GroupKind::FreeMonoid(_) => {}
        }
        if let Some(inv) = &self.inverses {
            for (g, h) in self.generators.iter().zip(inv) {
                if !g.then(h)?.is_identity() || !h.then(g)?.is_identity() {
                    return Err(domain!("inverse generator maps do not compose to the identity"));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &GeneratedGroup {
        &self.group
    }

    pub fn space(&self) -> &S {
        &self.space
    }

    pub fn mode(&self) -> ActionMode {
        self.mode
    }

    pub fn generator_maps(&self) -> &[PointMap] {
        &self.generators
    }

    pub fn inverse_maps(&self) -> Option<&[PointMap]> {
        self.inverses.as_deref()
    }

    /// The symmetric generating set in group mode, the generators otherwise.
    pub fn step_maps(&self) -> Vec<&PointMap> {
        let mut v: Vec<&PointMap> = self.generators.iter().collect();
        if let Some(inv) = &self.inverses {
            v.extend(inv.iter());
        }
        v
    }

    /// Group elements matching [`step_maps`](Self::step_maps).
    pub fn step_elements(&self) -> Vec<Element> {
        let mut v = self.group.generators();
        if self.inverses.is_some() {
            let inv: Vec<Element> = v.iter().map(|g| self.group.inverse(g).expect("group mode has inverses")).collect();
            v.extend(inv);
        }
        v
    }

    /// Whether `α_g` can be evaluated in this action's mode.
    pub fn can_evaluate(&self, g: &Element) -> bool {
        self.group.contains(g) && (self.inverses.is_some() || !g.has_negative_exponent())
    }

    /// `α_g` as a point map. Words act right to left, so `α_{gh} = α_g ∘ α_h`.
    pub fn map_of(&self, g: &Element) -> Result<PointMap> {
        if !self.group.contains(g) {
            return Err(domain!("{g:?} is not an element of the acting group"));
        }
        let n = self.space.len();
        let mut acc = PointMap::identity(n);
        for (gen, exp) in g.letters().into_iter().rev() {
            let step = if exp >= 0 {
                &self.generators[gen]
            } else {
                match &self.inverses {
                    Some(inv) => &inv[gen],
                    None => return Err(domain!("{g} needs inverses, action is in semigroup mode")),
                }
            };
            for _ in 0..exp.unsigned_abs() {
                acc = acc.then(step)?;
            }
        }
        Ok(acc)
    }

    /// Maps of every evaluable element of the radius-`r` ball.
    pub fn ball_maps(&self, radius: usize) -> Result<Vec<(Element, PointMap)>> {
        let nonneg = self.mode == ActionMode::Semigroup;
        self.group
            .ball(radius, nonneg)?
            .into_iter()
            .map(|g| {
                let m = self.map_of(&g)?;
                Ok((g, m))
            })
            .collect()
    }

    /// Same action on a different (usually borrowed) space handle.
    pub fn with_space<T: MetricSpace>(&self, space: T) -> Result<FiniteAction<T>> {
        if space.len() != self.space.len() {
            return Err(domain!("replacement space has {} points, expected {}", space.len(), self.space.len()));
        }
        Ok(FiniteAction {
            group: self.group.clone(),
            space,
            generators: self.generators.clone(),
            inverses: self.inverses.clone(),
            mode: self.mode,
        })
    }

    /// The action on a borrowed space.
    pub fn by_ref(&self) -> FiniteAction<&S> {
        FiniteAction {
            group: self.group.clone(),
            space: &self.space,
            generators: self.generators.clone(),
            inverses: self.inverses.clone(),
            mode: self.mode,
        }
    }
}

/// `sup_x d(f(x), g(x))` measured in the common target.
pub fn d_sup<Y: MetricSpace + ?Sized>(target: &Y, f: &PointMap, g: &PointMap) -> Result<f64> {
    if f.source_len() != g.source_len() || f.target_len() != g.target_len() {
        return Err(domain!("maps have different source or target"));
    }
    if f.target_len() != target.len() {
        return Err(domain!("maps target {} points, space has {}", f.target_len(), target.len()));
    }
    Ok(sup_pointwise(target, f.image(), g.image()))
}

fn sup_pointwise<Y: MetricSpace + ?Sized>(target: &Y, a: &[usize], b: &[usize]) -> f64 {
    a.iter().zip(b).map(|(&p, &q)| if p == q { 0.0 } else { target.dist(p, q) }).fold(0.0, f64::max)
}

fn same_group<A: MetricSpace, B: MetricSpace>(a: &FiniteAction<A>, b: &FiniteAction<B>) -> Result<()> {
    if a.group.kind() != b.group.kind() {
        return Err(domain!("actions of different groups ({:?} and {:?})", a.group.kind(), b.group.kind()));
    }
    Ok(())
}

/// Generator maps shared by two actions of the same group: inverses are
/// included only when both act in group mode.
fn common_steps<'a, A: MetricSpace, B: MetricSpace>(
    a: &'a FiniteAction<A>,
    b: &'a FiniteAction<B>,
) -> Vec<(&'a PointMap, &'a PointMap)> {
    let mut v: Vec<_> = a.generators.iter().zip(&b.generators).collect();
    if let (Some(ia), Some(ib)) = (&a.inverses, &b.inverses) {
        v.extend(ia.iter().zip(ib));
    }
    v
}

/// `sup_{s ∈ S, x} d(α_s x, β_s x)` for two actions on the same space.
pub fn d_s<A: MetricSpace, B: MetricSpace>(alpha: &FiniteAction<A>, beta: &FiniteAction<B>) -> Result<f64> {
    same_group(alpha, beta)?;
    if alpha.space.len() != beta.space.len() {
        return Err(domain!("actions live on spaces of different size"));
    }
    Ok(common_steps(alpha, beta)
        .into_iter()
        .map(|(a, b)| sup_pointwise(&alpha.space, a.image(), b.image()))
        .fold(0.0, f64::max))
}

fn defect_unchecked<A: MetricSpace, B: MetricSpace>(
    f: &[usize],
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
) -> f64 {
    let mut worst = 0.0f64;
    for (a, b) in common_steps(alpha, beta) {
        for (x, &fx) in f.iter().enumerate() {
            let p = b.apply(fx);
            let q = f[a.apply(x)];
            if p != q {
                worst = worst.max(beta.space.dist(p, q));
            }
        }
    }
    worst
}

/// `max_{s ∈ S} d_sup(β_s ∘ f, f ∘ α_s)` for `f` from α's space to β's.
pub fn equivariant_defect<A: MetricSpace, B: MetricSpace>(
    f: &PointMap,
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
) -> Result<f64> {
    same_group(alpha, beta)?;
    f.check_spaces(&alpha.space, &beta.space)?;
    Ok(defect_unchecked(f.image(), alpha, beta))
}

/// Every generator (and inverse) map preserves distances exactly, up to
/// floating-point rounding of the stored metric.
pub fn is_isometric_action<S: MetricSpace>(alpha: &FiniteAction<S>) -> bool {
    alpha.step_maps().into_iter().all(|m| distortion_unchecked(&alpha.space, &alpha.space, m.image()) <= 1e-12)
}

/// The three defects of one map in an equivariant approximation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Defects {
    pub distortion: f64,
    pub net_defect: f64,
    pub equivariant: f64,
}

impl Defects {
    pub fn max(&self) -> f64 {
        self.distortion.max(self.net_defect).max(self.equivariant)
    }
}

fn defects_of<A: MetricSpace, B: MetricSpace>(f: &[usize], alpha: &FiniteAction<A>, beta: &FiniteAction<B>) -> Defects {
    Defects {
        distortion: distortion_unchecked(&alpha.space, &beta.space, f),
        net_defect: net_defect_unchecked(&beta.space, f),
        equivariant: defect_unchecked(f, alpha, beta),
    }
}

/// Certified upper bound on `d_GH,S(α, β)`: both maps are ε-isometries with
/// equivariant defect at most ε.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivariantCertificate {
    pub epsilon: f64,
    /// `f: X → Y`.
    pub forward: PointMap,
    /// `g: Y → X`.
    pub backward: PointMap,
    pub forward_defects: Defects,
    pub backward_defects: Defects,
    pub evaluated: usize,
}

impl EquivariantCertificate {
    /// Scores a given pair of maps.
    pub fn measure<A: MetricSpace, B: MetricSpace>(
        alpha: &FiniteAction<A>,
        beta: &FiniteAction<B>,
        forward: &PointMap,
        backward: &PointMap,
    ) -> Result<Self> {
        same_group(alpha, beta)?;
        forward.check_spaces(&alpha.space, &beta.space)?;
        backward.check_spaces(&beta.space, &alpha.space)?;
        let fd = defects_of(forward.image(), alpha, beta);
        let bd = defects_of(backward.image(), beta, alpha);
        Ok(EquivariantCertificate {
            epsilon: fd.max().max(bd.max()),
            forward: forward.clone(),
            backward: backward.clone(),
            forward_defects: fd,
            backward_defects: bd,
            evaluated: 0,
        })
    }

    /// The same maps read as a certificate for `(β, α)`.
    pub fn swapped(&self) -> Self {
        EquivariantCertificate {
            epsilon: self.epsilon,
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            forward_defects: self.backward_defects,
            backward_defects: self.forward_defects,
            evaluated: self.evaluated,
        }
    }
}

fn equivariant_direction<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    config: SearchConfig,
    extra: &[PointMap],
) -> Result<(PointMap, Defects, usize)> {
    let mut seeds = Vec::new();
    for m in extra {
        m.check_spaces(&alpha.space, &beta.space)?;
        seeds.push(m.image().to_vec());
    }
    seeds.extend(greedy_seeds(&alpha.space, &beta.space, 8));
    let out = local_search(alpha.space.len(), beta.space.len(), seeds, config.budget, config.seed, |f| {
        defects_of(f, alpha, beta).max()
    });
    let defects = defects_of(&out.image, alpha, beta);
    let f = PointMap::new(alpha.space.len(), beta.space.len(), out.image)?;
    Ok((f, defects, out.evaluated))
}

/// Upper bound on `d_GH,S(α, β)` by local search seeded with greedy
/// approximations and any caller-supplied maps.
pub fn dgh_s_upper<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    config: SearchConfig,
    forward_seeds: &[PointMap],
    backward_seeds: &[PointMap],
) -> Result<EquivariantCertificate> {
    same_group(alpha, beta)?;
    let (forward, fd, ef) = equivariant_direction(alpha, beta, config, forward_seeds)?;
    let (backward, bd, eb) = equivariant_direction(beta, alpha, config, backward_seeds)?;
    Ok(EquivariantCertificate {
        epsilon: fd.max().max(bd.max()),
        forward,
        backward,
        forward_defects: fd,
        backward_defects: bd,
        evaluated: ef + eb,
    })
}

/// Whether two spaces have identical distance tables.
pub fn spaces_coincide<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(x: &X, y: &Y) -> bool {
    let n = x.len();
    n == y.len() && (0..n).all(|i| (i + 1..n).all(|j| x.dist(i, j) == y.dist(i, j)))
}

/// Certificate-level checks of the quasi-metric properties of `d_GH,S`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuasimetricReport {
    pub alpha_beta: f64,
    pub beta_alpha: f64,
    pub alpha_gamma: f64,
    pub gamma_beta: f64,
    /// Plain two-sided approximation score of the `(α, β)` maps.
    pub plain_alpha_beta: f64,
    /// `d_S(α, β)` when both actions live on the same space.
    pub d_s: Option<f64>,
    pub symmetric: bool,
    pub plain_below_equivariant: bool,
    pub below_d_s: Option<bool>,
    pub relaxed_triangle: bool,
    /// Set when the `(α, β)` certificate is 0: whether its forward map
    /// intertwines every generator exactly.
    pub conjugacy: Option<bool>,
}

impl QuasimetricReport {
    pub fn all_pass(&self) -> bool {
        self.symmetric
            && self.plain_below_equivariant
            && self.below_d_s.unwrap_or(true)
            && self.relaxed_triangle
            && self.conjugacy.unwrap_or(true)
    }
}

/// Runs [`dgh_s_upper`] on the three pairs and checks symmetry, the plain
/// lower comparison, `d_GH,S ≤ d_S` on a common space, and the relaxed
/// triangle inequality. The `(α, β)` search is also seeded with the
/// compositions through γ and with `hint` when given.
pub fn quasimetric_report<A: MetricSpace, B: MetricSpace, C: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    gamma: &FiniteAction<C>,
    config: SearchConfig,
    hint: Option<(&PointMap, &PointMap)>,
) -> Result<QuasimetricReport> {
    same_group(alpha, beta)?;
    same_group(alpha, gamma)?;
    let ag = dgh_s_upper(alpha, gamma, config, &[], &[])?;
    let gb = dgh_s_upper(gamma, beta, config, &[], &[])?;
    let mut fwd = alloc::vec![ag.forward.then(&gb.forward)?];
    let mut bwd = alloc::vec![gb.backward.then(&ag.backward)?];
    if let Some((f, g)) = hint {
        fwd.push(f.clone());
        bwd.push(g.clone());
    }
    let ab = dgh_s_upper(alpha, beta, config, &fwd, &bwd)?;
    let ba = EquivariantCertificate::measure(beta, alpha, &ab.backward, &ab.forward)?;

    let plain = distortion_unchecked(&alpha.space, &beta.space, ab.forward.image())
        .max(net_defect_unchecked(&beta.space, ab.forward.image()))
        .max(distortion_unchecked(&beta.space, &alpha.space, ab.backward.image()))
        .max(net_defect_unchecked(&alpha.space, ab.backward.image()));

    let d_s_value = if spaces_coincide(&alpha.space, &beta.space) { Some(d_s(alpha, beta)?) } else { None };
    let conjugacy = (ab.epsilon <= BOUND_TOL).then(|| {
        common_steps(alpha, beta).into_iter().all(|(a, b)| a.then(&ab.forward).ok() == ab.forward.then(b).ok())
    });

    Ok(QuasimetricReport {
        alpha_beta: ab.epsilon,
        beta_alpha: ba.epsilon,
        alpha_gamma: ag.epsilon,
        gamma_beta: gb.epsilon,
        plain_alpha_beta: plain,
        d_s: d_s_value,
        symmetric: (ab.epsilon - ba.epsilon).abs() <= BOUND_TOL,
        plain_below_equivariant: plain <= ab.epsilon + BOUND_TOL,
        below_d_s: d_s_value.map(|d| ab.epsilon <= d + BOUND_TOL),
        relaxed_triangle: ab.epsilon <= 2.0 * (ag.epsilon + gb.epsilon) + BOUND_TOL,
        conjugacy,
    })
}

/// Options for the two-group searches.
#[derive(Debug, Clone)]
pub struct Dgh1Config {
    pub search: SearchConfig,
    /// Radius of the ball of `G` over which the sup is taken.
    pub radius: usize,
    /// Radius of the ball of `H` that candidate generator images come from.
    pub rho_radius: usize,
    /// Use only this homomorphism instead of enumerating.
    pub rho: Option<Homomorphism>,
    /// Extra candidate maps `Y → X`.
    pub seeds: Vec<PointMap>,
}

impl Default for Dgh1Config {
    fn default() -> Self {
        Dgh1Config {
            search: SearchConfig::default(),
            radius: DEFAULT_BALL_RADIUS,
            rho_radius: 1,
            rho: None,
            seeds: Vec::new(),
        }
    }
}

/// An ε-equivariant approximation `(f: Y → X, ρ: G → H)` for `α` (of `G` on
/// `X`) against `β` (of `H` on `Y`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dgh1Certificate {
    pub epsilon: f64,
    pub rho: Homomorphism,
    pub map: PointMap,
    pub distortion: f64,
    pub net_defect: f64,
    /// Sup over the ball of `G` of `d_sup(α_g ∘ f, f ∘ β_ρ(g))`.
    pub equivariant: f64,
    pub radius: usize,
    pub label: String,
    pub evaluated: usize,
}

/// Precomputed pairs `(α_g, β_ρ(g))` over the ball of `G`.
struct BallPairs {
    alpha: Vec<PointMap>,
    beta: Vec<PointMap>,
}

fn ball_pairs<B: MetricSpace>(
    alpha_ball: &[(Element, PointMap)],
    beta: &FiniteAction<B>,
    rho: &Homomorphism,
) -> Option<BallPairs> {
    let mut pairs = BallPairs { alpha: Vec::new(), beta: Vec::new() };
    for (g, a) in alpha_ball {
        let h = rho.apply(g).ok()?;
        if !beta.can_evaluate(&h) {
            return None;
        }
        pairs.alpha.push(a.clone());
        pairs.beta.push(beta.map_of(&h).ok()?);
    }
    Some(pairs)
}

fn two_group_defect<X: MetricSpace>(x: &X, f: &[usize], pairs: &BallPairs) -> f64 {
    let mut worst = 0.0f64;
    for (a, b) in pairs.alpha.iter().zip(&pairs.beta) {
        for (y, &fy) in f.iter().enumerate() {
            let p = a.apply(fy);
            let q = f[b.apply(y)];
            if p != q {
                worst = worst.max(x.dist(p, q));
            }
        }
    }
    worst
}

/// Scores a fixed `(f, ρ)` pair.
pub fn dgh1_score<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    rho: &Homomorphism,
    f: &PointMap,
    radius: usize,
) -> Result<Dgh1Certificate> {
    check_rho(alpha, beta, rho)?;
    f.check_spaces(&beta.space, &alpha.space)?;
    let ball = alpha.ball_maps(radius)?;
    let pairs =
        ball_pairs(&ball, beta, rho).ok_or_else(|| domain!("ρ sends part of the ball outside what β can evaluate"))?;
    Ok(certificate_for(alpha, beta, rho, f.image().to_vec(), &pairs, radius, 1))
}

fn check_rho<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    rho: &Homomorphism,
) -> Result<()> {
    if rho.source() != alpha.group() || rho.target() != beta.group() {
        return Err(domain!("ρ does not go from α's group to β's group"));
    }
    Ok(())
}

fn certificate_for<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    rho: &Homomorphism,
    image: Vec<usize>,
    pairs: &BallPairs,
    radius: usize,
    evaluated: usize,
) -> Dgh1Certificate {
    let distortion = distortion_unchecked(&beta.space, &alpha.space, &image);
    let net_defect = net_defect_unchecked(&alpha.space, &image);
    let equivariant = two_group_defect(&alpha.space, &image, pairs);
    Dgh1Certificate {
        epsilon: distortion.max(net_defect).max(equivariant),
        rho: rho.clone(),
        map: PointMap::new(beta.space.len(), alpha.space.len(), image).expect("search keeps indices in range"),
        distortion,
        net_defect,
        equivariant,
        radius,
        label: String::from(BALL_TRUNCATED),
        evaluated,
    }
}

/// Upper bound on `d_GH,1(α, β)`: minimises over candidate homomorphisms
/// `ρ: G → H` and searched maps `f: Y → X`. Ties go to the earlier ρ in
/// enumeration order.
pub fn dgh1_upper<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    config: &Dgh1Config,
) -> Result<Dgh1Certificate> {
    let rhos = match &config.rho {
        Some(r) => {
            check_rho(alpha, beta, r)?;
            alloc::vec![r.clone()]
        }
        None => enumerate_homomorphisms(alpha.group(), beta.group(), config.rho_radius)?,
    };
    let ball = alpha.ball_maps(config.radius)?;
    let mut seeds: Vec<Vec<usize>> = Vec::new();
    for m in &config.seeds {
        m.check_spaces(&beta.space, &alpha.space)?;
        seeds.push(m.image().to_vec());
    }
    seeds.extend(greedy_seeds(&beta.space, &alpha.space, 8));

    let mut best: Option<Dgh1Certificate> = None;
    let mut total = 0usize;
    for rho in &rhos {
        let Some(pairs) = ball_pairs(&ball, beta, rho) else { continue };
        let out = local_search(
            beta.space.len(),
            alpha.space.len(),
            seeds.clone(),
            config.search.budget,
            config.search.seed,
            |f| {
                distortion_unchecked(&beta.space, &alpha.space, f)
                    .max(net_defect_unchecked(&alpha.space, f))
                    .max(two_group_defect(&alpha.space, f, &pairs))
            },
        );
        total += out.evaluated;
        let cert = certificate_for(alpha, beta, rho, out.image, &pairs, config.radius, out.evaluated);
        if best.as_ref().is_none_or(|b| cert.epsilon < b.epsilon) {
            best = Some(cert);
        }
    }
    let mut best = best.ok_or_else(|| domain!("no candidate homomorphism can be evaluated on β"))?;
    best.evaluated = total;
    Ok(best)
}

/// Two-sided certificate for `d_GH,2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dgh2Certificate {
    pub epsilon: f64,
    /// `(f: Y → X, ρ: G → H)`.
    pub forward: Dgh1Certificate,
    /// `(h: X → Y, φ: H → G)`.
    pub backward: Dgh1Certificate,
}

/// Upper bound on `d_GH,2(α, β)` from both one-sided searches.
pub fn dgh2_upper<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    forward: &Dgh1Config,
    backward: &Dgh1Config,
) -> Result<Dgh2Certificate> {
    let f = dgh1_upper(alpha, beta, forward)?;
    let b = dgh1_upper(beta, alpha, backward)?;
    Ok(Dgh2Certificate { epsilon: f.epsilon.max(b.epsilon), forward: f, backward: b })
}

/// Candidate for `(α, β)` obtained by composing a certificate for `(α, γ)`
/// with one for `(γ, β)`: the map `f ∘ v` and homomorphism `φ ∘ ρ`.
pub fn compose_dgh1<A: MetricSpace, B: MetricSpace>(
    alpha: &FiniteAction<A>,
    beta: &FiniteAction<B>,
    alpha_gamma: &Dgh1Certificate,
    gamma_beta: &Dgh1Certificate,
) -> Result<Dgh1Certificate> {
    let f = gamma_beta.map.then(&alpha_gamma.map)?;
    let rho = alpha_gamma.rho.then(&gamma_beta.rho)?;
    dgh1_score(alpha, beta, &rho, &f, alpha_gamma.radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;

    fn cycle(n: usize) -> FiniteMetricSpace {
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let k = (i + n - j) % n;
                        k.min(n - k) as f64
                    })
                    .collect()
            })
            .collect();
        FiniteMetricSpace::from_matrix(m).unwrap()
    }

    fn rotation(n: usize, k: usize) -> PointMap {
        PointMap::from_fn(n, n, |i| (i + k) % n).unwrap()
    }

    fn rot_action(n: usize, k: usize) -> FiniteAction<FiniteMetricSpace> {
        FiniteAction::new(GeneratedGroup::z(), cycle(n), alloc::vec![rotation(n, k)], ActionMode::Group).unwrap()
    }

    #[test]
    fn d_sup_on_cycle() {
        let c = cycle(4);
        assert_eq!(d_sup(&c, &PointMap::identity(4), &rotation(4, 1)).unwrap(), 1.0);
        assert_eq!(d_sup(&c, &rotation(4, 1), &rotation(4, 1)).unwrap(), 0.0);
    }

    #[test]
    fn relation_checks() {
        let c = cycle(6);
        let r = FiniteAction::new(
            GeneratedGroup::cyclic(3).unwrap(),
            c.clone(),
            alloc::vec![rotation(6, 2)],
            ActionMode::Group,
        );
        assert!(r.is_ok());
        let bad = FiniteAction::new(
            GeneratedGroup::cyclic(4).unwrap(),
            c.clone(),
            alloc::vec![rotation(6, 2)],
            ActionMode::Group,
        );
        assert!(bad.is_err());
        let fold = PointMap::from_fn(6, 6, |i| i / 2).unwrap();
        assert!(
            FiniteAction::new(GeneratedGroup::z(), c.clone(), alloc::vec![fold.clone()], ActionMode::Group).is_err()
        );
        let semi = FiniteAction::infer(GeneratedGroup::z(), c, alloc::vec![fold]).unwrap();
        assert_eq!(semi.mode(), ActionMode::Semigroup);
        assert!(semi.map_of(&Element::Z(-1)).is_err());
    }

    #[test]
    fn map_of_composes() {
        let a = rot_action(7, 2);
        assert_eq!(a.map_of(&Element::Z(3)).unwrap(), rotation(7, 6));
        assert_eq!(a.map_of(&Element::Z(-1)).unwrap(), rotation(7, 5));
        assert!(a.map_of(&Element::Z(0)).unwrap().is_identity());
    }

    #[test]
    fn equal_actions_have_zero_distance() {
        let a = rot_action(6, 1);
        assert_eq!(d_s(&a, &a).unwrap(), 0.0);
        let c = dgh_s_upper(&a, &a, SearchConfig::default(), &[], &[]).unwrap();
        assert_eq!(c.epsilon, 0.0);
        assert!(is_isometric_action(&a));
    }

    #[test]
    fn adjacent_rotations() {
        let a = rot_action(12, 1);
        let b = rot_action(12, 2);
        assert_eq!(d_s(&a, &b).unwrap(), 1.0);
        let id = FiniteAction::trivial(GeneratedGroup::z(), cycle(12)).unwrap();
        assert_eq!(d_s(&a, &id).unwrap(), 1.0);
        let c = dgh_s_upper(&a, &b, SearchConfig::default(), &[], &[]).unwrap();
        assert!(c.epsilon <= 1.0 + BOUND_TOL);
    }

    #[test]
    fn conjugate_actions_certify_zero() {
        let n = 5;
        let a = rot_action(n, 1);
        // β = p ∘ α ∘ p⁻¹ with p(i) = 2i mod 5, which is not an isometry of
        // the cycle, so put the pulled-back metric on β's space.
        let p = PointMap::from_fn(n, n, |i| (2 * i) % n).unwrap();
        let pinv = p.inverse().unwrap();
        let base = cycle(n);
        let m: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| base.dist(pinv.apply(i), pinv.apply(j))).collect()).collect();
        let gen = pinv.then(&rotation(n, 1)).unwrap().then(&p).unwrap();
        let b = FiniteAction::new(
            GeneratedGroup::z(),
            FiniteMetricSpace::from_matrix(m).unwrap(),
            alloc::vec![gen],
            ActionMode::Group,
        )
        .unwrap();
        let report = quasimetric_report(&a, &b, &a, SearchConfig::default(), Some((&p, &pinv))).unwrap();
        assert_eq!(report.alpha_beta, 0.0);
        assert_eq!(report.conjugacy, Some(true));
        assert!(report.all_pass());
    }

    #[test]
    fn rotation_triangle() {
        let a = rot_action(8, 1);
        let b = rot_action(8, 3);
        let c = rot_action(8, 2);
        let r = quasimetric_report(&a, &b, &c, SearchConfig { budget: 500, seed: 3 }, None).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.below_d_s, Some(true));
    }

    #[test]
    fn dgh1_identity() {
        let a = rot_action(6, 1);
        let cfg = Dgh1Config { rho: Some(Homomorphism::identity(a.group())), ..Dgh1Config::default() };
        let c = dgh1_upper(&a, &a, &cfg).unwrap();
        assert_eq!(c.epsilon, 0.0);
        assert_eq!(c.label, BALL_TRUNCATED);
        let free = dgh1_upper(&a, &a, &Dgh1Config::default()).unwrap();
        assert_eq!(free.epsilon, 0.0);
    }

    #[test]
    fn dgh2_identity() {
        let a = rot_action(5, 2);
        let c = dgh2_upper(&a, &a, &Dgh1Config::default(), &Dgh1Config::default()).unwrap();
        assert_eq!(c.epsilon, 0.0);
    }
}
