//! Finite metric spaces, point maps and Gromov-Hausdorff approximations.

mod gh;

pub(crate) use gh::greedy_seeds;
pub use gh::{gh_exact, gha_search, gha_search_seeded, GhValue, GhaSearchResult, SearchConfig, GH_EXACT_MAX_POINTS};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, precondition, violated, Result};
use crate::linalg::abs;
use crate::BOUND_TOL;

/// Tolerance for the metric axioms checked when a dense space is built.
pub const AXIOM_TOL: f64 = 1e-9;

/// A finite metric space addressed by point index `0..len()`.
///
/// Large structured spaces (grids, products) implement this lazily; small
/// or user-supplied ones are materialised as [`FiniteMetricSpace`].
pub trait MetricSpace {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    /// Squared distance; products override this to skip a square root.
    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        let d = self.dist(i, j);
        d * d
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }
}

impl<T: MetricSpace + ?Sized> MetricSpace for &T {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        (**self).dist_sq(i, j)
    }
    fn diameter(&self) -> f64 {
        (**self).diameter()
    }
}

impl<T: MetricSpace + ?Sized> MetricSpace for alloc::boxed::Box<T> {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        (**self).dist_sq(i, j)
    }
    fn diameter(&self) -> f64 {
        (**self).diameter()
    }
}

/// Dense, validated finite metric space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<f64>,
    diameter: f64,
}

impl FiniteMetricSpace {
    /// Builds a space from point ids and a full distance matrix, checking the
    /// metric axioms to [`AXIOM_TOL`].
    pub fn new(points: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(domain!("a metric space needs at least one point"));
        }
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(domain!("distance matrix must be {n}x{n}"));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let d = matrix[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(domain!("d[{i}][{j}] = {d} is not a finite non-negative number"));
                }
                if i == j && d > AXIOM_TOL {
                    return Err(domain!("d[{i}][{i}] = {d} must be zero"));
                }
                if i != j && d <= 0.0 {
                    return Err(domain!("points {i} and {j} are at distance zero"));
                }
                if abs(d - matrix[j][i]) > AXIOM_TOL {
                    return Err(domain!("distance matrix is not symmetric at ({i},{j})"));
                }
                dist[i * n + j] = if i == j { 0.0 } else { d };
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i * n + j] > dist[i * n + k] + dist[k * n + j] + AXIOM_TOL {
                        return Err(domain!("triangle inequality fails for ({i},{j}) via {k}"));
                    }
                }
            }
        }
        let diameter = dist.iter().cloned().fold(0.0, f64::max);
        Ok(FiniteMetricSpace { points, dist, diameter })
    }

    /// Space with ids `"0".."n-1"`.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let points = (0..matrix.len()).map(|i| format!("{i}")).collect();
        Self::new(points, matrix)
    }

    /// Materialises any metric space, re-checking the axioms.
    pub fn from_space<M: MetricSpace + ?Sized>(space: &M) -> Result<Self> {
        let n = space.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| space.dist(i, j)).collect()).collect();
        Self::from_matrix(matrix)
    }

    /// Points of the real line with `d(x,y) = |x-y|`.
    pub fn line(coords: &[f64]) -> Result<Self> {
        let matrix = coords.iter().map(|a| coords.iter().map(|b| abs(a - b)).collect()).collect();
        Self::from_matrix(matrix)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.points.len();
        (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect()
    }
}

impl MetricSpace for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.points.len()
    }
    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }
    fn diameter(&self) -> f64 {
        self.diameter
    }
}

/// A map between the index sets of two finite spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointMap {
    source_len: usize,
    target_len: usize,
    image: Vec<usize>,
}

impl PointMap {
    pub fn new(source_len: usize, target_len: usize, image: Vec<usize>) -> Result<Self> {
        if image.len() != source_len {
            return Err(domain!("map image has {} entries for a source of {source_len} points", image.len()));
        }
        if let Some((i, &t)) = image.iter().enumerate().find(|(_, &t)| t >= target_len) {
            return Err(domain!("image of {i} is {t}, target has {target_len} points"));
        }
        Ok(PointMap { source_len, target_len, image })
    }

    pub fn from_fn(source_len: usize, target_len: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(source_len, target_len, (0..source_len).map(f).collect())
    }

    pub fn identity(n: usize) -> Self {
        PointMap { source_len: n, target_len: n, image: (0..n).collect() }
    }

    pub fn constant(source_len: usize, target_len: usize, value: usize) -> Result<Self> {
        Self::new(source_len, target_len, vec![value; source_len])
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PointMap) -> Result<PointMap> {
        if self.target_len != next.source_len {
            return Err(domain!(
                "cannot compose: {} target points vs {} source points",
                self.target_len,
                next.source_len
            ));
        }
        Ok(PointMap {
            source_len: self.source_len,
            target_len: next.target_len,
            image: self.image.iter().map(|&t| next.image[t]).collect(),
        })
    }

    pub fn is_bijection(&self) -> bool {
        if self.source_len != self.target_len {
            return false;
        }
        let mut seen = vec![false; self.target_len];
        self.image.iter().all(|&t| !core::mem::replace(&mut seen[t], true))
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Option<PointMap> {
        if !self.is_bijection() {
            return None;
        }
        let mut inv = vec![0; self.source_len];
        for (i, &t) in self.image.iter().enumerate() {
            inv[t] = i;
        }
        Some(PointMap { source_len: self.target_len, target_len: self.source_len, image: inv })
    }

    pub fn is_identity(&self) -> bool {
        self.source_len == self.target_len && self.image.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub(crate) fn check_spaces<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(&self, x: &X, y: &Y) -> Result<()> {
        if self.source_len != x.len() || self.target_len != y.len() {
            return Err(domain!(
                "map is {}→{} points but spaces have {} and {}",
                self.source_len,
                self.target_len,
                x.len(),
                y.len()
            ));
        }
        Ok(())
    }
}

/// A relation between two index sets that is onto both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    source_len: usize,
    target_len: usize,
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(source_len: usize, target_len: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut src = vec![false; source_len];
        let mut tgt = vec![false; target_len];
        for &(a, b) in &pairs {
            if a >= source_len || b >= target_len {
                return Err(domain!("pair ({a},{b}) out of range"));
            }
            src[a] = true;
            tgt[b] = true;
        }
        if let Some(a) = src.iter().position(|c| !c) {
            return Err(domain!("source point {a} has no partner"));
        }
        if let Some(b) = tgt.iter().position(|c| !c) {
            return Err(domain!("target point {b} has no partner"));
        }
        Ok(Correspondence { source_len, target_len, pairs })
    }

    /// Graph of `f` together with the transposed graph of `g`.
    pub fn from_maps(f: &PointMap, g: &PointMap) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = f.image.iter().cloned().enumerate().collect();
        pairs.extend(g.image.iter().enumerate().map(|(y, &x)| (x, y)));
        Self::new(f.source_len, f.target_len, pairs)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn distortion<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(&self, x: &X, y: &Y) -> f64 {
        let mut worst = 0.0f64;
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            for &(c, d) in &self.pairs[k + 1..] {
                worst = worst.max(abs(x.dist(a, c) - y.dist(b, d)));
            }
        }
        worst
    }
}

/// Evidence that a map is an ε-Gromov-Hausdorff approximation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GhaCertificate {
    pub epsilon: f64,
    pub forward: PointMap,
    pub backward: Option<PointMap>,
    pub distortion: f64,
    /// Smallest `r` such that the closed `r`-neighbourhood of the image is
    /// the whole target.
    pub net_defect: f64,
}

impl GhaCertificate {
    /// Certificate with the tightest ε the map supports.
    pub fn measure<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(x: &X, y: &Y, f: &PointMap) -> Result<Self> {
        let distortion = distortion(x, y, f)?;
        let net_defect = net_defect(y, f)?;
        Ok(GhaCertificate {
            epsilon: distortion.max(net_defect),
            forward: f.clone(),
            backward: None,
            distortion,
            net_defect,
        })
    }

    pub fn holds(&self) -> bool {
        self.distortion.max(self.net_defect) <= self.epsilon + BOUND_TOL
    }
}

fn check_subset<M: MetricSpace + ?Sized>(space: &M, set: &[usize], name: &str) -> Result<()> {
    if set.is_empty() {
        return Err(domain!("{name} is empty"));
    }
    if let Some(&i) = set.iter().find(|&&i| i >= space.len()) {
        return Err(domain!("{name} contains {i}, space has {} points", space.len()));
    }
    Ok(())
}

/// Largest distance from a point of `from` to the set `to`.
fn directed_hausdorff<M: MetricSpace + ?Sized>(space: &M, from: &[usize], to: &[usize]) -> f64 {
    from.iter().map(|&a| to.iter().map(|&b| space.dist(a, b)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

pub fn hausdorff_distance<M: MetricSpace + ?Sized>(space: &M, a: &[usize], b: &[usize]) -> Result<f64> {
    check_subset(space, a, "first set")?;
    check_subset(space, b, "second set")?;
    Ok(directed_hausdorff(space, a, b).max(directed_hausdorff(space, b, a)))
}

/// `max |d_Y(f x, f x') - d_X(x, x')|` over all source pairs.
pub fn distortion<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(x: &X, y: &Y, f: &PointMap) -> Result<f64> {
    f.check_spaces(x, y)?;
    Ok(distortion_unchecked(x, y, &f.image))
}

pub(crate) fn distortion_unchecked<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    image: &[usize],
) -> f64 {
    let n = image.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let fi = image[i];
        for j in i + 1..n {
            worst = worst.max(abs(y.dist(fi, image[j]) - x.dist(i, j)));
        }
    }
    worst
}

/// Smallest `r` with `B'_r(f(X)) = Y`.
pub fn net_defect<Y: MetricSpace + ?Sized>(y: &Y, f: &PointMap) -> Result<f64> {
    if f.target_len != y.len() {
        return Err(domain!("map targets {} points, space has {}", f.target_len, y.len()));
    }
    Ok(net_defect_unchecked(y, &f.image))
}

pub(crate) fn net_defect_unchecked<Y: MetricSpace + ?Sized>(y: &Y, image: &[usize]) -> f64 {
    let mut hit = vec![false; y.len()];
    for &t in image {
        hit[t] = true;
    }
    let centers: Vec<usize> = (0..y.len()).filter(|&t| hit[t]).collect();
    covering_radius_unchecked(y, &centers)
}

fn covering_radius_unchecked<M: MetricSpace + ?Sized>(space: &M, centers: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for p in 0..space.len() {
        let mut best = f64::INFINITY;
        for &c in centers {
            let d = space.dist(p, c);
            if d < best {
                best = d;
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Largest distance from a point of the space to the set `net`.
pub fn covering_radius<M: MetricSpace + ?Sized>(space: &M, net: &[usize]) -> Result<f64> {
    check_subset(space, net, "net")?;
    Ok(covering_radius_unchecked(space, net))
}

/// Checks the ε-isometry conditions; the certificate records the measured
/// distortion and net defect against the requested ε.
pub fn is_eps_isometry<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    f: &PointMap,
    epsilon: f64,
) -> Result<(bool, GhaCertificate)> {
    if !(epsilon >= 0.0) {
        return Err(precondition!("epsilon must be non-negative, got {epsilon}"));
    }
    let mut cert = GhaCertificate::measure(x, y, f)?;
    cert.epsilon = epsilon;
    Ok((cert.holds(), cert))
}

fn require_eps_isometry<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    f: &PointMap,
    epsilon: f64,
) -> Result<GhaCertificate> {
    let (ok, cert) = is_eps_isometry(x, y, f, epsilon)?;
    if !ok {
        return Err(precondition!(
            "map is not a {epsilon}-isometry (distortion {}, net defect {})",
            cert.distortion,
            cert.net_defect
        ));
    }
    Ok(cert)
}

fn sup_dist<M: MetricSpace + ?Sized>(space: &M, a: &[usize], b: &[usize]) -> f64 {
    a.iter().zip(b).map(|(&p, &q)| space.dist(p, q)).fold(0.0, f64::max)
}

/// Approximation inverse `f′: Y → X` of an ε-isometry `f: X → Y`.
///
/// Each target point goes to the smallest-index source point whose image is
/// nearest to it. The 3ε distortion, 2ε round trip on `X` and ε round trip on
/// `Y` are all verified before returning.
pub fn approx_inverse<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    f: &PointMap,
    epsilon: f64,
) -> Result<PointMap> {
    require_eps_isometry(x, y, f, epsilon)?;
    let image: Vec<usize> = (0..y.len())
        .map(|t| {
            let mut best = (f64::INFINITY, 0);
            for s in 0..x.len() {
                let d = y.dist(f.image[s], t);
                if d < best.0 {
                    best = (d, s);
                }
            }
            best.1
        })
        .collect();
    let inv = PointMap { source_len: y.len(), target_len: x.len(), image };

    let dis = distortion_unchecked(y, x, &inv.image);
    if dis > 3.0 * epsilon + BOUND_TOL {
        return Err(violated!("inverse distortion {dis} exceeds 3ε = {}", 3.0 * epsilon));
    }
    let round_x: Vec<usize> = f.image.iter().map(|&t| inv.image[t]).collect();
    let ident_x: Vec<usize> = (0..x.len()).collect();
    let rx = sup_dist(x, &ident_x, &round_x);
    if rx > 2.0 * epsilon + BOUND_TOL {
        return Err(violated!("sup d(x, f′f x) = {rx} exceeds 2ε = {}", 2.0 * epsilon));
    }
    let round_y: Vec<usize> = inv.image.iter().map(|&s| f.image[s]).collect();
    let ident_y: Vec<usize> = (0..y.len()).collect();
    let ry = sup_dist(y, &ident_y, &round_y);
    if ry > epsilon + BOUND_TOL {
        return Err(violated!("sup d(y, f f′y) = {ry} exceeds ε = {epsilon}"));
    }
    Ok(inv)
}

/// Greedy farthest-point ε-net, starting from point 0; ties go to the
/// smallest index.
pub fn eps_net<M: MetricSpace + ?Sized>(space: &M, epsilon: f64) -> Result<Vec<usize>> {
    if !(epsilon > 0.0) {
        return Err(precondition!("epsilon must be positive, got {epsilon}"));
    }
    let n = space.len();
    if n == 0 {
        return Err(domain!("empty space"));
    }
    let mut net = vec![0usize];
    let mut gap: Vec<f64> = (0..n).map(|i| space.dist(i, 0)).collect();
    loop {
        let (far, d) =
            gap.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if d <= epsilon {
            return Ok(net);
        }
        net.push(far);
        for (i, g) in gap.iter_mut().enumerate() {
            *g = g.min(space.dist(i, far));
        }
    }
}

/// Measurable-style replacement of an ε-isometry: constant on the cells
/// `B_k = B'_ε(net_k) \ ⋃_{j<k} B'_ε(net_j)` with value `f(net_k)`.
///
/// The result is checked to be a 5ε-isometric map with net defect at most 3ε
/// and to stay within 2ε of `f` pointwise.
pub fn cellwise_gha<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    f: &PointMap,
    epsilon: f64,
    net: &[usize],
) -> Result<PointMap> {
    let radius = covering_radius(x, net)?;
    if radius > epsilon + BOUND_TOL {
        return Err(precondition!("net has covering radius {radius} > ε = {epsilon}"));
    }
    require_eps_isometry(x, y, f, epsilon)?;
    let image: Vec<usize> = (0..x.len())
        .map(|p| {
            let cell =
                net.iter().find(|&&c| x.dist(p, c) <= epsilon + BOUND_TOL).expect("covering radius checked above");
            f.image[*cell]
        })
        .collect();
    let f1 = PointMap { source_len: x.len(), target_len: y.len(), image };

    let dis = distortion_unchecked(x, y, &f1.image);
    if dis > 5.0 * epsilon + BOUND_TOL {
        return Err(violated!("cellwise map distortion {dis} exceeds 5ε"));
    }
    let nd = net_defect_unchecked(y, &f1.image);
    if nd > 3.0 * epsilon + BOUND_TOL {
        return Err(violated!("cellwise map net defect {nd} exceeds 3ε"));
    }
    let shift = sup_dist(y, &f.image, &f1.image);
    if shift > 2.0 * epsilon + BOUND_TOL {
        return Err(violated!("cellwise map moves points by {shift} > 2ε"));
    }
    Ok(f1)
}

/// Upper bound `2ε + δ` on `d_GH(X, Y)` from matched ε-nets whose distance
/// tables agree to within δ.
///
/// ε is the larger covering radius of the two nets. When both spaces are small
/// enough for [`gh_exact`], the exact value is checked against the bound.
pub fn net_approx_bound<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    net_x: &[usize],
    net_y: &[usize],
    delta: f64,
) -> Result<f64> {
    if net_x.len() != net_y.len() {
        return Err(precondition!("nets have different sizes ({} and {})", net_x.len(), net_y.len()));
    }
    let eps = covering_radius(x, net_x)?.max(covering_radius(y, net_y)?);
    for (i, (&a, &b)) in net_x.iter().zip(net_y).enumerate() {
        for (j, (&c, &d)) in net_x.iter().zip(net_y).enumerate() {
            let gap = abs(x.dist(a, c) - y.dist(b, d));
            if !(gap < delta) {
                return Err(precondition!("matched pair ({i},{j}) differs by {gap} ≥ δ = {delta}"));
            }
        }
    }
    let bound = 2.0 * eps + delta;
    if x.len() <= GH_EXACT_MAX_POINTS && y.len() <= GH_EXACT_MAX_POINTS {
        if let GhValue::Exact(gh) = gh_exact(x, y, None)? {
            if gh > bound + BOUND_TOL {
                return Err(violated!("d_GH = {gh} exceeds net bound {bound}"));
            }
        }
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(c: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::line(c).unwrap()
    }

    #[test]
    fn rejects_non_metrics() {
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(FiniteMetricSpace::from_matrix(bad).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![]).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(hausdorff_distance(&s, &[0, 2], &[0, 2]).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&s, &[0], &[2]).unwrap(), 3.0);
        assert_eq!(hausdorff_distance(&s, &[0, 2], &[1]).unwrap(), 2.0);
        assert!(matches!(hausdorff_distance(&s, &[], &[1]), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn distortion_examples() {
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(distortion(&s, &s, &PointMap::identity(3)).unwrap(), 0.0);
        let c = PointMap::constant(3, 3, 1).unwrap();
        assert_eq!(distortion(&s, &s, &c).unwrap(), s.diameter());
        let a = line(&[0.0, 1.0]);
        let b = line(&[0.0, 1.5]);
        assert_eq!(distortion(&a, &b, &PointMap::identity(2)).unwrap(), 0.5);
        assert!(distortion(&a, &s, &PointMap::identity(2)).is_err());
    }

    #[test]
    fn eps_isometry_examples() {
        let s = line(&[0.0, 1.0, 3.0]);
        assert!(is_eps_isometry(&s, &s, &PointMap::identity(3), 0.0).unwrap().0);
        let two = line(&[0.0, 1.0]);
        let c = PointMap::constant(2, 2, 0).unwrap();
        let (ok, cert) = is_eps_isometry(&two, &two, &c, 0.5).unwrap();
        assert!(!ok);
        assert_eq!(cert.net_defect, 1.0);
        assert!(is_eps_isometry(&two, &two, &c, -1.0).is_err());
    }

    #[test]
    fn approx_inverse_of_identity() {
        let s = line(&[0.0, 1.0, 3.0]);
        let inv = approx_inverse(&s, &s, &PointMap::identity(3), 0.0).unwrap();
        assert!(inv.is_identity());
        let c = PointMap::constant(3, 3, 0).unwrap();
        assert!(matches!(approx_inverse(&s, &s, &c, 0.5), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn eps_net_examples() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eps_net(&s, 10.0).unwrap(), vec![0]);
        let net = eps_net(&s, 1.0).unwrap();
        assert_eq!(net, vec![0, 4, 2]);
        assert!(covering_radius(&s, &net).unwrap() <= 1.0);
        assert_eq!(eps_net(&s, 0.5).unwrap().len(), 5);
        assert!(eps_net(&s, 0.0).is_err());
    }

    #[test]
    fn cellwise_with_full_net_is_f() {
        let s = line(&[0.0, 1.0, 2.5, 4.0]);
        let f = PointMap::identity(4);
        let f1 = cellwise_gha(&s, &s, &f, 0.5, &[0, 1, 2, 3]).unwrap();
        assert_eq!(f1, f);
    }

    #[test]
    fn cellwise_coarse_net() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let f = PointMap::identity(6);
        let net = eps_net(&s, 1.0).unwrap();
        // f is a 0-isometry, hence a 1-isometry.
        let f1 = cellwise_gha(&s, &s, &f, 1.0, &net).unwrap();
        assert!(distortion(&s, &s, &f1).unwrap() <= 5.0);
    }

    #[test]
    fn net_bound_identity() {
        let s = line(&[0.0, 1.0, 3.0]);
        let b = net_approx_bound(&s, &s, &[0, 1, 2], &[0, 1, 2], 1e-6).unwrap();
        assert!(b > 0.0 && b <= 1e-6);
        assert!(net_approx_bound(&s, &s, &[0, 1], &[0], 1.0).is_err());
        assert!(net_approx_bound(&s, &s, &[0, 1], &[0, 2], 0.5).is_err());
    }

    #[test]
    fn correspondence_requires_cover() {
        assert!(Correspondence::new(2, 2, vec![(0, 0), (1, 0)]).is_err());
        let r = Correspondence::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        let a = line(&[0.0, 1.0]);
        let b = line(&[0.0, 2.0]);
        assert_eq!(r.distortion(&a, &b), 1.0);
    }

    #[test]
    fn point_map_algebra() {
        let f = PointMap::new(3, 3, vec![1, 2, 0]).unwrap();
        let inv = f.inverse().unwrap();
        assert!(f.then(&inv).unwrap().is_identity());
        assert!(PointMap::new(2, 2, vec![0, 2]).is_err());
        assert!(PointMap::new(2, 2, vec![0]).is_err());
        assert!(PointMap::constant(2, 2, 0).unwrap().inverse().is_none());
    }
}
