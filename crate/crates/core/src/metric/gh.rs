//! Exact Gromov-Hausdorff distance by correspondence branch-and-bound, and
//! the heuristic search for mutual ε-approximations.

use alloc::vec;
use alloc::vec::Vec;

use super::{distortion_unchecked, net_defect_unchecked, GhaCertificate, MetricSpace, PointMap};
use crate::error::{refused, Result};
use crate::linalg::abs;
use crate::search::local_search;

/// Largest side for which [`gh_exact`] runs without an explicit budget.
pub const GH_EXACT_MAX_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GhValue {
    Exact(f64),
    /// The search budget ran out; the true value lies in `[lower, upper]`.
    Interval {
        lower: f64,
        upper: f64,
    },
}

impl GhValue {
    pub fn exact(self) -> Option<f64> {
        match self {
            GhValue::Exact(v) => Some(v),
            GhValue::Interval { .. } => None,
        }
    }

    pub fn lower(self) -> f64 {
        match self {
            GhValue::Exact(v) => v,
            GhValue::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(self) -> f64 {
        match self {
            GhValue::Exact(v) => v,
            GhValue::Interval { upper, .. } => upper,
        }
    }
}

struct Bnb<'a, X: ?Sized, Y: ?Sized> {
    x: &'a X,
    y: &'a Y,
    best: f64,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
    pairs: Vec<(usize, usize)>,
    covered: Vec<u32>,
}

impl<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized> Bnb<'_, X, Y> {
    /// Distortion added by pairing `a` with `b` given the pairs fixed so far.
    fn added(&self, a: usize, b: usize) -> f64 {
        self.pairs.iter().map(|&(c, d)| abs(self.x.dist(a, c) - self.y.dist(b, d))).fold(0.0, f64::max)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                self.exhausted = true;
                return false;
            }
        }
        true
    }

    /// Phase one gives every source point a partner, phase two gives every
    /// still-uncovered target point one. Every correspondence contains such a
    /// sub-relation and distortion is monotone under inclusion, so this covers
    /// the minimum.
    fn source_step(&mut self, a: usize, current: f64) {
        if self.exhausted || !self.tick() {
            return;
        }
        let nx = self.x.len();
        if a == nx {
            self.target_step(0, current);
            return;
        }
        // Admissible bound: every unpaired source point must pay its cheapest row.
        let mut bound = current;
        for r in a..nx {
            let cheapest = (0..self.y.len()).map(|b| self.added(r, b)).fold(f64::INFINITY, f64::min);
            bound = bound.max(cheapest);
            if bound >= self.best {
                return;
            }
        }
        let mut options: Vec<(f64, usize)> = (0..self.y.len()).map(|b| (current.max(self.added(a, b)), b)).collect();
        options.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap().then(p.1.cmp(&q.1)));
        for (cost, b) in options {
            if cost >= self.best || self.exhausted {
                break;
            }
            self.pairs.push((a, b));
            self.covered[b] += 1;
            self.source_step(a + 1, cost);
            self.covered[b] -= 1;
            self.pairs.pop();
        }
    }

    fn target_step(&mut self, b: usize, current: f64) {
        if self.exhausted || !self.tick() {
            return;
        }
        let ny = self.y.len();
        let mut b = b;
        while b < ny && self.covered[b] > 0 {
            b += 1;
        }
        if b == ny {
            if current < self.best {
                self.best = current;
            }
            return;
        }
        let mut options: Vec<(f64, usize)> = (0..self.x.len()).map(|a| (current.max(self.added(a, b)), a)).collect();
        options.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap().then(p.1.cmp(&q.1)));
        for (cost, a) in options {
            if cost >= self.best || self.exhausted {
                break;
            }
            self.pairs.push((a, b));
            self.target_step(b + 1, cost);
            self.pairs.pop();
        }
    }
}

/// `d_GH(X, Y) = ½ min_R dis(R)` over correspondences `R`.
///
/// Spaces with at most [`GH_EXACT_MAX_POINTS`] points per side are solved
/// exactly. Larger inputs need a node budget; if it runs out the result is an
/// interval whose lower end is `½|diam X − diam Y|`.
pub fn gh_exact<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    budget: Option<u64>,
) -> Result<GhValue> {
    let small = x.len() <= GH_EXACT_MAX_POINTS && y.len() <= GH_EXACT_MAX_POINTS;
    if !small && budget.is_none() {
        return Err(refused!(
            "exact GH search limited to {GH_EXACT_MAX_POINTS} points per side without a budget ({} and {} given)",
            x.len(),
            y.len()
        ));
    }
    if x.is_empty() || y.is_empty() {
        return Err(refused!("empty space"));
    }
    // Any correspondence is an upper bound; the full product is the cheapest to state.
    let full = x.diameter().max(y.diameter());
    let mut bnb = Bnb {
        x,
        y,
        best: full + 1.0,
        nodes: 0,
        budget: if small { None } else { budget },
        exhausted: false,
        pairs: Vec::new(),
        covered: vec![0; y.len()],
    };
    bnb.source_step(0, 0.0);
    let upper = bnb.best.min(full) / 2.0;
    if bnb.exhausted {
        let lower = (abs(x.diameter() - y.diameter()) / 2.0).min(upper);
        Ok(GhValue::Interval { lower, upper })
    } else {
        Ok(GhValue::Exact(upper))
    }
}

/// Budget and seed for the approximation searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    /// Number of candidate maps scored per direction.
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: 2000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GhaSearchResult {
    /// Upper estimate of the two-sided approximation distance.
    pub epsilon: f64,
    pub forward: GhaCertificate,
    pub backward: GhaCertificate,
    pub evaluated: usize,
}

/// Work cap (in distance evaluations) for building greedy seeds.
const GREEDY_WORK_LIMIT: usize = 20_000_000;

/// Greedy seeds: anchor point 0 at a few targets, then send each next point
/// to the target that best preserves distances to the points already placed.
pub(crate) fn greedy_seeds<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    anchors: usize,
) -> Vec<Vec<usize>> {
    let (nx, ny) = (x.len(), y.len());
    let mut seeds = Vec::new();
    if nx == ny {
        seeds.push((0..nx).collect());
    }
    seeds.push(vec![0; nx]);
    let per_seed = nx.saturating_mul(nx).saturating_mul(ny);
    if per_seed == 0 || per_seed > GREEDY_WORK_LIMIT {
        return seeds;
    }
    let count = anchors.min(ny).min((GREEDY_WORK_LIMIT / per_seed).max(1));
    for k in 0..count {
        let anchor = k * ny / count;
        let mut image = vec![anchor];
        for p in 1..nx {
            let mut best = (f64::INFINITY, 0);
            for t in 0..ny {
                let mut worst = 0.0f64;
                for (q, &u) in image.iter().enumerate() {
                    worst = worst.max(abs(y.dist(t, u) - x.dist(p, q)));
                    if worst >= best.0 {
                        break;
                    }
                }
                if worst < best.0 {
                    best = (worst, t);
                }
            }
            image.push(best.1);
        }
        seeds.push(image);
    }
    seeds
}

pub(crate) fn gha_score<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(x: &X, y: &Y, image: &[usize]) -> f64 {
    distortion_unchecked(x, y, image).max(net_defect_unchecked(y, image))
}

fn search_direction<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    config: SearchConfig,
    extra: &[PointMap],
) -> Result<(GhaCertificate, usize)> {
    let mut seeds: Vec<Vec<usize>> = Vec::new();
    for m in extra {
        m.check_spaces(x, y)?;
        seeds.push(m.image().to_vec());
    }
    seeds.extend(greedy_seeds(x, y, 8));
    let out = local_search(x.len(), y.len(), seeds, config.budget, config.seed, |m| gha_score(x, y, m));
    let f = PointMap::new(x.len(), y.len(), out.image)?;
    let cert = GhaCertificate::measure(x, y, &f)?;
    debug_assert!((cert.distortion.max(cert.net_defect) - out.score).abs() < 1e-12);
    Ok((cert, out.evaluated))
}

/// Searches for ε-approximations in both directions; the result's ε bounds the
/// two-sided approximation distance from above.
pub fn gha_search<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    config: SearchConfig,
) -> Result<GhaSearchResult> {
    gha_search_seeded(x, y, config, &[], &[])
}

/// As [`gha_search`], additionally scoring caller-supplied candidate maps.
pub fn gha_search_seeded<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(
    x: &X,
    y: &Y,
    config: SearchConfig,
    forward_seeds: &[PointMap],
    backward_seeds: &[PointMap],
) -> Result<GhaSearchResult> {
    let (forward, ef) = search_direction(x, y, config, forward_seeds)?;
    let (backward, eb) = search_direction(y, x, config, backward_seeds)?;
    Ok(GhaSearchResult { epsilon: forward.epsilon.max(backward.epsilon), forward, backward, evaluated: ef + eb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;

    fn line(c: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::line(c).unwrap()
    }

    #[test]
    fn identical_spaces() {
        let s = line(&[0.0, 1.0, 3.0, 7.0]);
        assert_eq!(gh_exact(&s, &s, None).unwrap(), GhValue::Exact(0.0));
        let r = gha_search(&s, &s, SearchConfig::default()).unwrap();
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn two_point_spaces() {
        // Three surjective correspondences: two bijections (distortion |a-b|)
        // and the full relation (distortion max(a,b)).
        for &(a, b) in &[(1.0, 2.0), (0.5, 3.0), (2.0, 2.0)] {
            let x = line(&[0.0, a]);
            let y = line(&[0.0, b]);
            let v = gh_exact(&x, &y, None).unwrap().exact().unwrap();
            assert!((v - f64::abs(a - b) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn point_versus_space() {
        let p = line(&[0.0]);
        let s = line(&[0.0, 1.0, 4.0]);
        assert_eq!(gh_exact(&p, &s, None).unwrap(), GhValue::Exact(2.0));
        assert_eq!(gh_exact(&s, &p, None).unwrap(), GhValue::Exact(2.0));
    }

    #[test]
    fn two_point_search_and_sandwich() {
        let x = line(&[0.0, 1.0]);
        let y = line(&[0.0, 2.0]);
        let r = gha_search(&x, &y, SearchConfig::default()).unwrap();
        assert_eq!(r.epsilon, 1.0);
        let gh = gh_exact(&x, &y, None).unwrap().exact().unwrap();
        assert_eq!(gh, 0.5);
        assert!(2.0 / 3.0 * gh <= r.epsilon && r.epsilon <= 2.0 * gh + 1e-12);
    }

    #[test]
    fn size_guard() {
        let big = line(&(0..9).map(|i| i as f64).collect::<Vec<_>>());
        assert!(matches!(gh_exact(&big, &big, None), Err(crate::Error::Refused(_))));
        let v = gh_exact(&big, &big, Some(1_000_000)).unwrap();
        assert_eq!(v.upper(), 0.0);
        let w = gh_exact(&big, &line(&[0.0, 1.0]), Some(3)).unwrap();
        assert!(w.lower() <= w.upper());
    }
}
