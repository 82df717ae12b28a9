//! Concrete spaces and actions: circle and torus grids, products, integer
//! matrix actions, rotations, the full shift, and the worked example
//! families built from them.
//!
//! Continuous maps are evaluated in real coordinates and snapped to the grid
//! only when a point map is exported; the snapping error is measured and
//! carried along as slack.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{equivariant_defect, ActionMode, FiniteAction};
use crate::error::{domain, violated, Result};
use crate::group::{Element, GeneratedGroup, Homomorphism};
use crate::linalg::{abs, circle_unit_dist, sqrt, torus_dist, IntMatrix2};
use crate::metric::{distortion, net_defect, FiniteMetricSpace, MetricSpace, PointMap};
use crate::BOUND_TOL;

/// Largest product space built.
pub const MAX_PRODUCT_POINTS: usize = 20_000;

/// Largest shift window (in words) built.
pub const MAX_SHIFT_WORDS: usize = 1 << 14;

/// `m` equally spaced points on the circle of radius `r`, arc-length metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    radius: f64,
    m: usize,
    table: Vec<f64>,
}

impl CircleGrid {
    pub fn new(radius: f64, m: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain!("circle radius must be positive, got {radius}"));
        }
        if m < 2 {
            return Err(domain!("a circle grid needs at least 2 points"));
        }
        let step = radius * 2.0 * PI / m as f64;
        let table = (0..m).map(|k| step * k.min(m - k) as f64).collect();
        Ok(CircleGrid { radius, m, table })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> usize {
        self.m
    }

    /// Arc length between adjacent points.
    pub fn step(&self) -> f64 {
        self.radius * 2.0 * PI / self.m as f64
    }

    /// Angle of point `i` in radians.
    pub fn angle(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.m as f64
    }

    /// Rotation by `k` grid steps.
    pub fn rotation(&self, k: i64) -> PointMap {
        let m = self.m as i64;
        PointMap::from_fn(self.m, self.m, |i| (i as i64 + k).rem_euclid(m) as usize).expect("in range")
    }
}

impl MetricSpace for CircleGrid {
    fn len(&self) -> usize {
        self.m
    }
    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.table[i.abs_diff(j)]
    }
    fn diameter(&self) -> f64 {
        self.table[self.m / 2]
    }
}

/// `make_circle`: a materialised [`CircleGrid`].
pub fn make_circle(radius: f64, m: usize) -> Result<FiniteMetricSpace> {
    let c = CircleGrid::new(radius, m)?;
    let names = (0..m).map(|i| alloc::format!("c{i}")).collect();
    FiniteMetricSpace::new(names, (0..m).map(|i| (0..m).map(|j| c.dist(i, j)).collect()).collect())
}

/// The `m×m` grid on `R²/Z²`; point `i·m + j` is `(i/m, j/m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    m: usize,
    sq: Vec<f64>,
}

impl TorusGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(domain!("a torus grid needs m ≥ 2"));
        }
        if m * m > MAX_PRODUCT_POINTS {
            return Err(domain!("torus grid of {} points exceeds the size guard", m * m));
        }
        let sq = (0..m)
            .map(|k| {
                let t = k.min(m - k) as f64 / m as f64;
                t * t
            })
            .collect();
        Ok(TorusGrid { m, sq })
    }

    pub fn side(&self) -> usize {
        self.m
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (i % self.m) * self.m + j % self.m
    }

    pub fn cell(&self, p: usize) -> (usize, usize) {
        (p / self.m, p % self.m)
    }

    pub fn coords(&self, p: usize) -> [f64; 2] {
        let (i, j) = self.cell(p);
        [i as f64 / self.m as f64, j as f64 / self.m as f64]
    }

    /// Nearest grid point to a point of `R²/Z²` (ties round up).
    pub fn snap(&self, q: [f64; 2]) -> usize {
        let m = self.m as f64;
        let i = libm::floor(crate::linalg::wrap_unit(q[0]) * m + 0.5) as usize % self.m;
        let j = libm::floor(crate::linalg::wrap_unit(q[1]) * m + 0.5) as usize % self.m;
        self.index(i, j)
    }

    /// Half the grid diagonal: the largest snapping error.
    pub fn half_mesh(&self) -> f64 {
        sqrt(2.0) / (2.0 * self.m as f64)
    }

    #[inline]
    fn delta(&self, a: usize, b: usize) -> usize {
        a.abs_diff(b)
    }
}

impl MetricSpace for TorusGrid {
    fn len(&self) -> usize {
        self.m * self.m
    }
    #[inline]
    fn dist(&self, p: usize, q: usize) -> f64 {
        sqrt(self.dist_sq(p, q))
    }
    #[inline]
    fn dist_sq(&self, p: usize, q: usize) -> f64 {
        let (a, b) = (p / self.m, p % self.m);
        let (c, d) = (q / self.m, q % self.m);
        self.sq[self.delta(a, c)] + self.sq[self.delta(b, d)]
    }
    fn diameter(&self) -> f64 {
        sqrt(2.0 * self.sq[self.m / 2])
    }
}

/// `make_torus`: a materialised [`TorusGrid`].
pub fn make_torus(m: usize) -> Result<FiniteMetricSpace> {
    let t = TorusGrid::new(m)?;
    FiniteMetricSpace::from_space(&t)
}

/// Cartesian product with `d = √(d_A² + d_B²)`; point `i·|B| + j` is `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Product<A, B> {
    a: A,
    b: B,
    nb: usize,
}

impl<A: MetricSpace, B: MetricSpace> Product<A, B> {
    pub fn new(a: A, b: B) -> Result<Self> {
        let total = a.len().saturating_mul(b.len());
        if total > MAX_PRODUCT_POINTS {
            return Err(domain!("product of {total} points exceeds the size guard"));
        }
        let nb = b.len();
        Ok(Product { a, b, nb })
    }

    pub fn first(&self) -> &A {
        &self.a
    }

    pub fn second(&self) -> &B {
        &self.b
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nb + j
    }

    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.nb, p % self.nb)
    }

    /// `(x, y) ↦ (f x, g y)`.
    pub fn product_map(&self, f: &PointMap, g: &PointMap) -> Result<PointMap> {
        if f.source_len() != self.a.len() || g.source_len() != self.nb {
            return Err(domain!("factor maps do not match the product"));
        }
        if f.target_len() != self.a.len() || g.target_len() != self.nb {
            return Err(domain!("factor maps must be self-maps"));
        }
        PointMap::from_fn(self.len(), self.len(), |p| {
            let (i, j) = self.split(p);
            self.index(f.apply(i), g.apply(j))
        })
    }
}

impl<A: MetricSpace, B: MetricSpace> MetricSpace for Product<A, B> {
    fn len(&self) -> usize {
        self.a.len() * self.nb
    }
    #[inline]
    fn dist(&self, p: usize, q: usize) -> f64 {
        sqrt(self.dist_sq(p, q))
    }
    #[inline]
    fn dist_sq(&self, p: usize, q: usize) -> f64 {
        let (i, j) = (p / self.nb, p % self.nb);
        let (k, l) = (q / self.nb, q % self.nb);
        let da = if i == k { 0.0 } else { self.a.dist_sq(i, k) };
        let db = if j == l { 0.0 } else { self.b.dist_sq(j, l) };
        da + db
    }
    fn diameter(&self) -> f64 {
        let (x, y) = (self.a.diameter(), self.b.diameter());
        sqrt(x * x + y * y)
    }
}

/// `product_space`: a materialised product.
pub fn product_space<A: MetricSpace, B: MetricSpace>(a: A, b: B) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_space(&Product::new(a, b)?)
}

/// Words of length `k` over `a` symbols, `d(x, y) = 2^{−min{i : x_i ≠ y_i}}`.
/// Word index is the base-`a` number with position 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpace {
    alphabet: usize,
    k: usize,
    len: usize,
}

impl ShiftSpace {
    pub fn new(alphabet: usize, k: usize) -> Result<Self> {
        if alphabet < 2 || k < 2 {
            return Err(domain!("the full shift needs at least 2 symbols and window 2"));
        }
        let len = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(alphabet)).unwrap_or(usize::MAX);
        if len > MAX_SHIFT_WORDS {
            return Err(domain!("{alphabet}^{k} words exceed the size guard"));
        }
        Ok(ShiftSpace { alphabet, k, len })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn window(&self) -> usize {
        self.k
    }

    pub fn word(&self, w: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.k];
        let mut r = w;
        for t in (0..self.k).rev() {
            out[t] = r % self.alphabet;
            r /= self.alphabet;
        }
        out
    }

    pub fn index_of(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |acc, &s| acc * self.alphabet + s)
    }

    /// First differing position, if any.
    pub fn first_difference(&self, x: usize, y: usize) -> Option<usize> {
        if x == y {
            return None;
        }
        let (wx, wy) = (self.word(x), self.word(y));
        wx.iter().zip(&wy).position(|(a, b)| a != b)
    }
}

impl MetricSpace for ShiftSpace {
    fn len(&self) -> usize {
        self.len
    }
    fn dist(&self, x: usize, y: usize) -> f64 {
        match self.first_difference(x, y) {
            None => 0.0,
            Some(i) => libm::ldexp(1.0, -(i as i32)),
        }
    }
    fn diameter(&self) -> f64 {
        1.0
    }
}

/// Snapping error of an exported grid map.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SnapRecord {
    /// Largest possible error from rounding one point to the grid.
    pub half_mesh: f64,
    /// Largest error actually observed over all grid points and generators.
    pub measured: f64,
    /// `2·half_mesh·L` with `L` the largest generator Lipschitz constant.
    pub lipschitz_bound: f64,
}

/// A torus map on the grid, evaluated in real coordinates and then snapped;
/// returns the map and the largest snapping error.
pub fn torus_matrix_map(grid: &TorusGrid, a: &IntMatrix2) -> (PointMap, f64) {
    let mut worst = 0.0f64;
    let image: Vec<usize> = (0..grid.len())
        .map(|p| {
            let q = a.apply_torus(grid.coords(p));
            let s = grid.snap(q);
            worst = worst.max(torus_dist(q, grid.coords(s)));
            s
        })
        .collect();
    (PointMap::new(grid.len(), grid.len(), image).expect("snap stays on grid"), worst)
}

fn matrix_snap(grid: &TorusGrid, mats: &[IntMatrix2]) -> (Vec<PointMap>, SnapRecord) {
    let mut maps = Vec::new();
    let mut rec = SnapRecord { half_mesh: grid.half_mesh(), ..SnapRecord::default() };
    for a in mats {
        let (m, err) = torus_matrix_map(grid, a);
        rec.measured = rec.measured.max(err);
        rec.lipschitz_bound = rec.lipschitz_bound.max(2.0 * grid.half_mesh() * a.operator_norm());
        maps.push(m);
    }
    (maps, rec)
}

fn matrix_mode(mats: &[IntMatrix2]) -> ActionMode {
    if mats.iter().all(IntMatrix2::is_unimodular) {
        ActionMode::Group
    } else {
        ActionMode::Semigroup
    }
}

/// `Z` acting on the torus grid by an integer matrix. Determinant ±1 gives
/// group mode, anything else semigroup mode.
pub fn toral_matrix_action<S: MetricSpace>(
    grid: &TorusGrid,
    space: S,
    a: IntMatrix2,
) -> Result<(FiniteAction<S>, SnapRecord)> {
    if space.len() != grid.len() {
        return Err(domain!("space handle does not match the grid"));
    }
    let (maps, rec) = matrix_snap(grid, &[a]);
    let act = FiniteAction::new(GeneratedGroup::z(), space, maps, matrix_mode(&[a]))?;
    Ok((act, rec))
}

/// `Z²` acting on the torus grid by two commuting integer matrices.
pub fn z2_matrix_action<S: MetricSpace>(
    grid: &TorusGrid,
    space: S,
    a: IntMatrix2,
    b: IntMatrix2,
) -> Result<(FiniteAction<S>, SnapRecord)> {
    if !a.commutes_with(&b) {
        return Err(domain!("matrices {:?} and {:?} do not commute", a.0, b.0));
    }
    if space.len() != grid.len() {
        return Err(domain!("space handle does not match the grid"));
    }
    let (maps, rec) = matrix_snap(grid, &[a, b]);
    let act = FiniteAction::new(GeneratedGroup::z2(), space, maps, matrix_mode(&[a, b]))?;
    Ok((act, rec))
}

/// Rotation of the circle grid by `angle` radians, snapped to the nearest
/// grid step; the snapping error is the arc length between the two.
pub fn rotation_action(circle: &CircleGrid, angle: f64) -> Result<(FiniteAction<CircleGrid>, SnapRecord)> {
    if !angle.is_finite() {
        return Err(domain!("angle must be finite"));
    }
    let m = circle.points() as f64;
    let steps = libm::round(angle * m / (2.0 * PI)) as i64;
    let err = circle.radius() * 2.0 * PI * circle_unit_dist(angle / (2.0 * PI), steps as f64 / m);
    let rec = SnapRecord { half_mesh: circle.step() / 2.0, measured: err, lipschitz_bound: circle.step() };
    let act =
        FiniteAction::new(GeneratedGroup::z(), circle.clone(), alloc::vec![circle.rotation(steps)], ActionMode::Group)?;
    Ok((act, rec))
}

/// The shift on the `k`-window approximation of the full shift.
#[derive(Debug, Clone)]
pub struct ShiftSystem {
    pub action: FiniteAction<ShiftSpace>,
    /// Symbol written into the freed last position, fixed from the seed.
    pub fill: usize,
    /// The window boundary is not part of the real system.
    pub boundary_approximate: bool,
}

/// `(σx)_i = x_{i+1}`, with the last position filled by one seed-chosen
/// symbol. Not injective, so the action runs in semigroup mode.
pub fn full_shift(alphabet: usize, k: usize, seed: u64) -> Result<ShiftSystem> {
    let space = ShiftSpace::new(alphabet, k)?;
    let fill = ChaCha8Rng::seed_from_u64(seed).gen_range(0..alphabet);
    let map = PointMap::from_fn(space.len(), space.len(), |w| {
        let mut word = space.word(w);
        word.remove(0);
        word.push(fill);
        space.index_of(&word)
    })?;
    let action = FiniteAction::new(GeneratedGroup::z(), space, alloc::vec![map], ActionMode::Semigroup)?;
    Ok(ShiftSystem { action, fill, boundary_approximate: true })
}

/// `S¹_{1/n} × S¹_{1/n} × T²` on grids.
pub type ExampleY = Product<Product<CircleGrid, CircleGrid>, TorusGrid>;

/// Matrices for the torus part and rotation steps for the circle part, one
/// per generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleDynamics {
    pub matrices: Vec<IntMatrix2>,
    pub gamma_steps: Vec<(i64, i64)>,
    /// Points on each small circle.
    pub circle_points: usize,
}

impl ExampleDynamics {
    /// The commuting pair `[[1,3],[2,4]]`, `[[−3,3],[2,0]]` with trivial γ.
    pub fn paper_pair() -> Self {
        ExampleDynamics {
            matrices: alloc::vec![IntMatrix2([[1, 3], [2, 4]]), IntMatrix2([[-3, 3], [2, 0]])],
            gamma_steps: alloc::vec![(0, 0), (0, 0)],
            circle_points: 4,
        }
    }

    /// The cat map `[[2,1],[1,1]]` with γ rotating both small circles.
    pub fn cat_map() -> Self {
        ExampleDynamics {
            matrices: alloc::vec![IntMatrix2([[2, 1], [1, 1]])],
            gamma_steps: alloc::vec![(1, 1)],
            circle_points: 4,
        }
    }

    pub fn with_gamma(mut self, steps: Vec<(i64, i64)>) -> Self {
        self.gamma_steps = steps;
        self
    }

    fn group(&self) -> Result<GeneratedGroup> {
        match self.matrices.len() {
            1 => Ok(GeneratedGroup::z()),
            2 => Ok(GeneratedGroup::z2()),
            k => Err(domain!("{k} matrices; only Z and Z² examples are built")),
        }
    }
}

/// Measured quantities of an example bundle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExampleMeasurements {
    pub h_distortion: f64,
    pub h_net_defect: f64,
    pub f_distortion: f64,
    pub f_net_defect: f64,
    /// `max_s d_sup(β_s ∘ f, f ∘ α_s)`.
    pub f_equivariant: f64,
    /// `max_s d_sup(α_s ∘ h, h ∘ β_s)`; zero when `h` intertwines exactly.
    pub h_equivariant: f64,
}

impl ExampleMeasurements {
    pub fn max(&self) -> f64 {
        [
            self.h_distortion,
            self.h_net_defect,
            self.f_distortion,
            self.f_net_defect,
            self.f_equivariant,
            self.h_equivariant,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Torus `X`, `Y = S¹_{1/n} × S¹_{1/n} × X`, projection `h`, section `f`, and
/// the actions `α` on `X` and `β = γ × α` on `Y`.
#[derive(Debug, Clone)]
pub struct ExampleFamily {
    pub n: usize,
    pub x: TorusGrid,
    pub y: ExampleY,
    pub alpha: FiniteAction<TorusGrid>,
    pub beta: FiniteAction<ExampleY>,
    pub h: PointMap,
    pub f: PointMap,
    /// `√2·π/n`.
    pub bound: f64,
    pub snap: SnapRecord,
    /// The measured snapping error; added to every bound check.
    pub slack: f64,
    pub measured: ExampleMeasurements,
}

fn example_y(n: usize, circle_points: usize, x: &TorusGrid) -> Result<ExampleY> {
    let c = CircleGrid::new(1.0 / n as f64, circle_points)?;
    Product::new(Product::new(c.clone(), c)?, x.clone())
}

fn gamma_map(y: &ExampleY, step: (i64, i64), torus: &PointMap) -> Result<PointMap> {
    let circles = y.first();
    let r1 = circles.first().rotation(step.0);
    let r2 = circles.second().rotation(step.1);
    let g = circles.product_map(&r1, &r2)?;
    y.product_map(&g, torus)
}

/// Projection `(s₁, s₂, x) ↦ x` and section `x ↦ (0, 0, x)`.
fn projection_and_section(y: &ExampleY, nx: usize) -> Result<(PointMap, PointMap)> {
    let h = PointMap::from_fn(y.len(), nx, |p| y.split(p).1)?;
    let f = PointMap::from_fn(nx, y.len(), |x| y.index(0, x))?;
    Ok((h, f))
}

/// Builds the example and checks its claims: `h` and `f` are
/// `(√2π/n + slack)`-isometries, `f` has equivariant defect at most that,
/// and `α_s ∘ h = h ∘ β_s` exactly.
pub fn example_family(n: usize, mesh: usize, dynamics: &ExampleDynamics) -> Result<ExampleFamily> {
    if n == 0 {
        return Err(domain!("n must be at least 1"));
    }
    let group = dynamics.group()?;
    if dynamics.gamma_steps.len() != dynamics.matrices.len() {
        return Err(domain!("one γ step per generator is required"));
    }
    let x = TorusGrid::new(mesh)?;
    let y = example_y(n, dynamics.circle_points, &x)?;
    let (torus_maps, snap) = matrix_snap(&x, &dynamics.matrices);
    let mode = matrix_mode(&dynamics.matrices);
    let alpha = FiniteAction::new(group.clone(), x.clone(), torus_maps.clone(), mode)?;
    let beta_maps =
        dynamics.gamma_steps.iter().zip(&torus_maps).map(|(&s, t)| gamma_map(&y, s, t)).collect::<Result<Vec<_>>>()?;
    let beta = FiniteAction::new(group, y.clone(), beta_maps, mode)?;
    let (h, f) = projection_and_section(&y, x.len())?;

    let measured = ExampleMeasurements {
        h_distortion: distortion(&y, &x, &h)?,
        h_net_defect: net_defect(&x, &h)?,
        f_distortion: distortion(&x, &y, &f)?,
        f_net_defect: net_defect(&y, &f)?,
        f_equivariant: equivariant_defect(&f, &alpha, &beta)?,
        h_equivariant: equivariant_defect(&h, &beta, &alpha)?,
    };
    let bound = sqrt(2.0) * PI / n as f64;
    let slack = snap.measured;
    let limit = bound + slack + BOUND_TOL;
    if measured.max() > limit {
        return Err(violated!("example defects {measured:?} exceed √2π/n + slack = {limit}"));
    }
    if measured.h_equivariant != 0.0 {
        return Err(violated!("projection does not intertwine the actions"));
    }
    Ok(ExampleFamily { n, x, y, alpha, beta, h, f, bound, snap, slack, measured })
}

/// The two-group variant: `α` of `⟨A⟩ ≅ Z` on the torus, `β̄` and `β̃` of
/// `Z²` on `Y`, with `ρ(Aᵏ) = (k, 0)` and `ρ₁((1,0)) = A`, `ρ₁((0,1)) = e`.
#[derive(Debug, Clone)]
pub struct TwoGroupExample {
    pub n: usize,
    pub x: TorusGrid,
    pub y: ExampleY,
    pub alpha: FiniteAction<TorusGrid>,
    /// `γ × ᾱ` with `ᾱ_(1,0) = A` and `ᾱ_(0,1) = C`.
    pub beta_bar: FiniteAction<ExampleY>,
    /// `γ × (α ∘ ρ₁)`.
    pub beta_tilde: FiniteAction<ExampleY>,
    pub rho: Homomorphism,
    pub rho1: Homomorphism,
    pub h: PointMap,
    pub f: PointMap,
    pub bound: f64,
    pub snap: SnapRecord,
    pub slack: f64,
}

/// Builds the two-group example from `A`, a matrix `C` commuting with `A`
/// and the two γ steps.
pub fn two_group_example(
    n: usize,
    mesh: usize,
    a: IntMatrix2,
    c: IntMatrix2,
    gamma_steps: [(i64, i64); 2],
) -> Result<TwoGroupExample> {
    if n == 0 {
        return Err(domain!("n must be at least 1"));
    }
    if !a.commutes_with(&c) {
        return Err(domain!("C must commute with A"));
    }
    let x = TorusGrid::new(mesh)?;
    let y = example_y(n, 4, &x)?;
    let (maps, snap) = matrix_snap(&x, &[a, c]);
    let alpha = FiniteAction::new(GeneratedGroup::z(), x.clone(), alloc::vec![maps[0].clone()], matrix_mode(&[a]))?;
    let bar_maps = alloc::vec![gamma_map(&y, gamma_steps[0], &maps[0])?, gamma_map(&y, gamma_steps[1], &maps[1])?];
    let beta_bar = FiniteAction::new(GeneratedGroup::z2(), y.clone(), bar_maps, matrix_mode(&[a, c]))?;
    let id = PointMap::identity(x.len());
    let tilde_maps = alloc::vec![gamma_map(&y, gamma_steps[0], &maps[0])?, gamma_map(&y, gamma_steps[1], &id)?];
    let beta_tilde = FiniteAction::new(GeneratedGroup::z2(), y.clone(), tilde_maps, matrix_mode(&[a]))?;
    let rho = Homomorphism::new(GeneratedGroup::z(), GeneratedGroup::z2(), alloc::vec![Element::Z2(1, 0)])?;
    let rho1 = Homomorphism::new(GeneratedGroup::z2(), GeneratedGroup::z(), alloc::vec![Element::Z(1), Element::Z(0)])?;
    let (h, f) = projection_and_section(&y, x.len())?;
    let slack = snap.measured;
    Ok(TwoGroupExample {
        n,
        x,
        y,
        alpha,
        beta_bar,
        beta_tilde,
        rho,
        rho1,
        h,
        f,
        bound: sqrt(2.0) * PI / n as f64,
        snap,
        slack,
    })
}

/// `X_n = S¹_{1/n} × S¹` with the diagonal rotation, `X = S¹` with the
/// rotation, projection `h_n` and section `f_n`.
#[derive(Debug, Clone)]
pub struct IsometryFamily {
    pub n: usize,
    pub step: usize,
    pub x_n: Product<CircleGrid, CircleGrid>,
    pub x: CircleGrid,
    pub alpha_n: FiniteAction<Product<CircleGrid, CircleGrid>>,
    pub alpha: FiniteAction<CircleGrid>,
    pub h: PointMap,
    pub f: PointMap,
    /// `π/n`.
    pub bound: f64,
    pub slack: f64,
    pub measured: ExampleMeasurements,
    /// Whether the step is coprime to the grid size, the grid stand-in for an
    /// irrational rotation.
    pub coprime: bool,
}

/// Builds the isometric family and checks that `h_n`, `f_n` are
/// `(π/n + slack)`-isometries with equivariant defect at most `π/n + slack`
/// and that `h_n ∘ α_n = α ∘ h_n` exactly.
pub fn example_isometry_family(n: usize, mesh: usize, step: usize) -> Result<IsometryFamily> {
    if n == 0 {
        return Err(domain!("n must be at least 1"));
    }
    let small = CircleGrid::new(1.0 / n as f64, mesh)?;
    let x = CircleGrid::new(1.0, mesh)?;
    let x_n = Product::new(small.clone(), x.clone())?;
    let k = step as i64;
    let alpha_n = FiniteAction::new(
        GeneratedGroup::z(),
        x_n.clone(),
        alloc::vec![x_n.product_map(&small.rotation(k), &x.rotation(k))?],
        ActionMode::Group,
    )?;
    let alpha = FiniteAction::new(GeneratedGroup::z(), x.clone(), alloc::vec![x.rotation(k)], ActionMode::Group)?;
    let h = PointMap::from_fn(x_n.len(), x.len(), |p| x_n.split(p).1)?;
    let f = PointMap::from_fn(x.len(), x_n.len(), |z| x_n.index(0, z))?;
    let measured = ExampleMeasurements {
        h_distortion: distortion(&x_n, &x, &h)?,
        h_net_defect: net_defect(&x, &h)?,
        f_distortion: distortion(&x, &x_n, &f)?,
        f_net_defect: net_defect(&x_n, &f)?,
        f_equivariant: equivariant_defect(&f, &alpha, &alpha_n)?,
        h_equivariant: equivariant_defect(&h, &alpha_n, &alpha)?,
    };
    let bound = PI / n as f64;
    let slack = 0.0;
    if measured.max() > bound + slack + BOUND_TOL {
        return Err(violated!("isometry family defects {measured:?} exceed π/n"));
    }
    if measured.h_equivariant != 0.0 {
        return Err(violated!("h_n does not intertwine the rotations"));
    }
    Ok(IsometryFamily { n, step, x_n, x, alpha_n, alpha, h, f, bound, slack, measured, coprime: gcd(step, mesh) == 1 })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Description of a system, as accepted by the scenario front end.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum SystemSpec {
    Circle { radius: f64, points: usize },
    Torus { mesh: usize },
    Product { factors: Vec<SystemSpec> },
    ToralMatrix { mesh: usize, matrix: IntMatrix2 },
    Rotation { radius: f64, points: usize, angle: f64 },
    Z2Matrices { mesh: usize, a: IntMatrix2, b: IntMatrix2 },
    FullShift { alphabet: usize, window: usize },
}

/// Type-erased space, for front ends that pick systems at run time.
pub type DynSpace = alloc::boxed::Box<dyn MetricSpace>;

impl SystemSpec {
    pub fn name(&self) -> String {
        String::from(match self {
            SystemSpec::Circle { .. } => "circle",
            SystemSpec::Torus { .. } => "torus",
            SystemSpec::Product { .. } => "product",
            SystemSpec::ToralMatrix { .. } => "toral_matrix",
            SystemSpec::Rotation { .. } => "rotation",
            SystemSpec::Z2Matrices { .. } => "z2_matrices",
            SystemSpec::FullShift { .. } => "full_shift",
        })
    }

    /// The underlying space.
    pub fn space(&self) -> Result<DynSpace> {
        use alloc::boxed::Box;
        Ok(match self {
            SystemSpec::Circle { radius, points } | SystemSpec::Rotation { radius, points, .. } => {
                Box::new(CircleGrid::new(*radius, *points)?)
            }
            SystemSpec::Torus { mesh } | SystemSpec::ToralMatrix { mesh, .. } | SystemSpec::Z2Matrices { mesh, .. } => {
                Box::new(TorusGrid::new(*mesh)?)
            }
            SystemSpec::FullShift { alphabet, window } => Box::new(ShiftSpace::new(*alphabet, *window)?),
            SystemSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it.next().ok_or_else(|| domain!("empty product"))?.space()?;
                let mut acc: DynSpace = first;
                for f in it {
                    acc = Box::new(Product::new(acc, f.space()?)?);
                }
                acc
            }
        })
    }

    /// The action, for the families that carry one.
    pub fn action(&self, seed: u64) -> Result<(FiniteAction<DynSpace>, SnapRecord)> {
        match self {
            SystemSpec::ToralMatrix { mesh, matrix } => {
                let g = TorusGrid::new(*mesh)?;
                toral_matrix_action(&g, self.space()?, *matrix)
            }
            SystemSpec::Z2Matrices { mesh, a, b } => {
                let g = TorusGrid::new(*mesh)?;
                z2_matrix_action(&g, self.space()?, *a, *b)
            }
            SystemSpec::Rotation { radius, points, angle } => {
                let c = CircleGrid::new(*radius, *points)?;
                let (act, rec) = rotation_action(&c, *angle)?;
                Ok((act.with_space(self.space()?)?, rec))
            }
            SystemSpec::FullShift { alphabet, window } => {
                let s = full_shift(*alphabet, *window, seed)?;
                Ok((s.action.with_space(self.space()?)?, SnapRecord::default()))
            }
            _ => Err(domain!("{} has no action", self.name())),
        }
    }
}

/// Largest `|d_A(i,j) − d_B(i,j)|`; used to compare a lazy space with its
/// materialised copy.
pub fn max_metric_gap<A: MetricSpace + ?Sized, B: MetricSpace + ?Sized>(a: &A, b: &B) -> f64 {
    let n = a.len().min(b.len());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(abs(a.dist(i, j) - b.dist(i, j)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::is_isometric_action;

    #[test]
    fn circle_distances() {
        let c = CircleGrid::new(1.0, 4).unwrap();
        assert!((c.dist(0, 1) - PI / 2.0).abs() < 1e-15);
        assert!((c.dist(0, 2) - PI).abs() < 1e-15);
        assert!((c.diameter() - PI).abs() < 1e-15);
        let two = make_circle(0.5, 2).unwrap();
        assert!((two.dist(0, 1) - PI / 2.0).abs() < 1e-15);
        assert!(CircleGrid::new(1.0, 1).is_err());
        let small = CircleGrid::new(1.0 / 3.0, 12).unwrap();
        assert!((small.diameter() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn torus_distances() {
        let t = TorusGrid::new(4).unwrap();
        assert_eq!(t.dist(t.index(0, 0), t.index(2, 0)), 0.5);
        assert!((t.dist(t.index(0, 0), t.index(2, 2)) - sqrt(2.0) / 2.0).abs() < 1e-15);
        assert_eq!(t.dist(5, 5), 0.0);
        assert!((t.diameter() - sqrt(2.0) / 2.0).abs() < 1e-15);
        let dense = make_torus(4).unwrap();
        assert_eq!(max_metric_gap(&t, &dense), 0.0);
    }

    #[test]
    fn products() {
        let a = FiniteMetricSpace::line(&[0.0, 3.0]).unwrap();
        let b = FiniteMetricSpace::line(&[0.0, 4.0]).unwrap();
        let p = Product::new(a.clone(), b).unwrap();
        assert_eq!(p.diameter(), 5.0);
        assert_eq!(product_space(a.clone(), a.clone()).unwrap().len(), 4);
        let point = FiniteMetricSpace::line(&[0.0]).unwrap();
        let q = Product::new(a.clone(), point).unwrap();
        assert_eq!(max_metric_gap(&q, &a), 0.0);
    }

    #[test]
    fn shift_metric_and_map() {
        let s = full_shift(2, 4, 0).unwrap();
        let sp = s.action.space();
        assert_eq!(sp.dist(0b0000, 0b1000), 1.0);
        assert_eq!(sp.dist(0b0000, 0b0001), 0.125);
        assert_eq!(sp.dist(3, 3), 0.0);
        let g = &s.action.generator_maps()[0];
        let w = sp.word(g.apply(sp.index_of(&[1, 0, 1, 1])));
        assert_eq!(&w[..3], &[0, 1, 1]);
        assert_eq!(w[3], s.fill);
        assert_eq!(s.action.mode(), ActionMode::Semigroup);
    }

    #[test]
    fn matrix_actions_snap_exactly() {
        let g = TorusGrid::new(16).unwrap();
        let (cat, rec) = toral_matrix_action(&g, g.clone(), IntMatrix2([[2, 1], [1, 1]])).unwrap();
        assert_eq!(cat.mode(), ActionMode::Group);
        assert!(rec.measured < 1e-12);
        assert!(!is_isometric_action(&cat));
        let (paper, _) =
            z2_matrix_action(&g, g.clone(), IntMatrix2([[1, 3], [2, 4]]), IntMatrix2([[-3, 3], [2, 0]])).unwrap();
        assert_eq!(paper.mode(), ActionMode::Semigroup);
        assert!(z2_matrix_action(&g, g.clone(), IntMatrix2([[2, 1], [1, 1]]), IntMatrix2([[1, 1], [0, 1]])).is_err());
    }

    #[test]
    fn rotations_are_isometric() {
        let c = CircleGrid::new(1.0, 12).unwrap();
        let (rot, rec) = rotation_action(&c, 2.0 * PI * 5.0 / 12.0).unwrap();
        assert!(rec.measured < 1e-12);
        assert!(is_isometric_action(&rot));
        let (_, off) = rotation_action(&c, 0.1).unwrap();
        assert!((off.measured - 0.1).abs() < 1e-12);
        let triv = FiniteAction::trivial(GeneratedGroup::z(), c).unwrap();
        assert!(is_isometric_action(&triv));
    }

    #[test]
    fn small_example_family() {
        let e = example_family(2, 8, &ExampleDynamics::paper_pair()).unwrap();
        assert!((e.bound - 2.221441469079183).abs() < 1e-12);
        assert_eq!(e.measured.h_net_defect, 0.0);
        assert!(e.measured.max() <= e.bound + e.slack + BOUND_TOL);
        let cat = example_family(3, 8, &ExampleDynamics::cat_map()).unwrap();
        assert_eq!(cat.alpha.mode(), ActionMode::Group);
    }

    #[test]
    fn isometry_family() {
        let fam = example_isometry_family(4, 12, 5).unwrap();
        assert!(fam.coprime);
        assert!(fam.measured.f_equivariant <= PI / 4.0 + 1e-12);
        let still = example_isometry_family(4, 12, 0).unwrap();
        assert_eq!(still.measured.f_equivariant, 0.0);
    }

    #[test]
    fn spec_builds() {
        let spec = SystemSpec::Product {
            factors: alloc::vec![SystemSpec::Circle { radius: 1.0, points: 3 }, SystemSpec::Torus { mesh: 2 }],
        };
        assert_eq!(spec.space().unwrap().len(), 12);
        let (a, _) = SystemSpec::ToralMatrix { mesh: 5, matrix: IntMatrix2([[2, 1], [1, 1]]) }.action(0).unwrap();
        assert_eq!(a.space().len(), 25);
    }
}
