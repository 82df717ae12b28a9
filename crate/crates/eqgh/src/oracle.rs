//! Independent reference computations used to cross-check the core crate.
//!
//! Nothing here shares code with the solvers it checks: Gromov-Hausdorff
//! values come from clique search over compatible pairs, transport values
//! from enumerating vertices of the transportation polytope, and tracing
//! corrections from one dense linear solve.

use std::collections::HashMap;

use eqgh_core::linalg::IntMatrix2;
use eqgh_core::metric::MetricSpace;
use eqgh_core::wasserstein::DiscreteMeasure;
use nalgebra::{DMatrix, DVector};

/// Largest `|X|·|Y|` accepted by [`gh_clique`].
pub const CLIQUE_MAX_PAIRS: usize = 64;

/// Largest `|X|·|Y|` accepted by [`gh_relations`].
pub const RELATIONS_MAX_PAIRS: usize = 20;

fn dist_matrix<M: MetricSpace + ?Sized>(m: &M) -> Vec<Vec<f64>> {
    (0..m.len()).map(|i| (0..m.len()).map(|j| m.dist(i, j)).collect()).collect()
}

fn candidate_thresholds(dx: &[Vec<f64>], dy: &[Vec<f64>]) -> Vec<f64> {
    let mut t = vec![0.0];
    for a in dx.iter().flatten() {
        for b in dy.iter().flatten() {
            t.push((a - b).abs());
        }
    }
    t.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    t.dedup();
    t
}

/// `d_GH` as half the smallest `t` for which some set of pairwise
/// `t`-compatible pairs covers both spaces, found by maximal-clique search.
pub fn gh_clique<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(x: &X, y: &Y) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    assert!(nx > 0 && ny > 0, "spaces must be non-empty");
    assert!(nx * ny <= CLIQUE_MAX_PAIRS, "too many pairs for the clique oracle");
    let (dx, dy) = (dist_matrix(x), dist_matrix(y));
    let ts = candidate_thresholds(&dx, &dy);
    let feasible = |t: f64| {
        let v = nx * ny;
        let adj: Vec<u64> = (0..v)
            .map(|p| {
                let (i, j) = (p / ny, p % ny);
                (0..v).filter(|&q| q != p && (dx[i][q / ny] - dy[j][q % ny]).abs() <= t).fold(0u64, |m, q| m | (1 << q))
            })
            .collect();
        let full = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
        let cover = Cover { nx, ny, adj: &adj };
        cover.search(0, full, 0)
    };
    let (mut lo, mut hi) = (0usize, ts.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(ts[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    ts[lo] / 2.0
}

struct Cover<'a> {
    nx: usize,
    ny: usize,
    adj: &'a [u64],
}

impl Cover<'_> {
    fn covers(&self, set: u64) -> bool {
        let (mut rows, mut cols) = (0u64, 0u64);
        let mut s = set;
        while s != 0 {
            let p = s.trailing_zeros() as usize;
            rows |= 1 << (p / self.ny);
            cols |= 1 << (p % self.ny);
            s &= s - 1;
        }
        rows.count_ones() as usize == self.nx && cols.count_ones() as usize == self.ny
    }

    /// Bron-Kerbosch with pivoting; stops at the first covering clique.
    fn search(&self, r: u64, p: u64, x: u64) -> bool {
        if !self.covers(r | p) {
            return false;
        }
        if p == 0 {
            return true;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut cand = p & !self.adj[pivot];
        let (mut p, mut x) = (p, x);
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let bit = 1u64 << v;
            if self.search(r | bit, p & self.adj[v], x & self.adj[v]) {
                return true;
            }
            p &= !bit;
            x |= bit;
            cand &= !bit;
        }
        false
    }
}

/// `d_GH` by enumerating every relation `R ⊆ X × Y` as a bitmask.
pub fn gh_relations<X: MetricSpace + ?Sized, Y: MetricSpace + ?Sized>(x: &X, y: &Y) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    let v = nx * ny;
    assert!(v > 0 && v <= RELATIONS_MAX_PAIRS, "too many pairs for relation enumeration");
    let table: Vec<f64> = (0..v * v)
        .map(|k| {
            let (p, q) = (k / v, k % v);
            (x.dist(p / ny, q / ny) - y.dist(p % ny, q % ny)).abs()
        })
        .collect();
    let row_bits = (1u32 << ny) - 1;
    let mut best = f64::INFINITY;
    'masks: for mask in 1u32..(1u32 << v) {
        let mut cols = 0u32;
        for i in 0..nx {
            let row = mask >> (i * ny) & row_bits;
            if row == 0 {
                continue 'masks;
            }
            cols |= row;
        }
        if cols != row_bits {
            continue;
        }
        let mut dis = 0.0f64;
        let mut ps = mask;
        while ps != 0 {
            let p = ps.trailing_zeros() as usize;
            ps &= ps - 1;
            let mut qs = mask & !((2u32 << p) - 1);
            while qs != 0 {
                let q = qs.trailing_zeros() as usize;
                qs &= qs - 1;
                dis = dis.max(table[p * v + q]);
            }
            if dis >= best {
                continue 'masks;
            }
        }
        best = dis;
    }
    best / 2.0
}

/// Minimum cost over the vertices of the transportation polytope
/// `{π ≥ 0 : π1 = a, πᵀ1 = b}`.
///
/// Every vertex has a forest as support, and any forest can be peeled leaf by
/// leaf: the leaf's cell carries `min(a_i, b_j)` of the remaining masses.
/// Enumerating all peeling orders therefore visits every vertex; states are
/// memoised on the remaining rows, columns and masses.
pub fn transport_vertex_min(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    assert!(a.len() <= 16 && b.len() <= 16, "vertex enumeration is for small supports");
    let mut memo = HashMap::new();
    let rows = (1u32 << a.len()) - 1;
    let cols = (1u32 << b.len()) - 1;
    peel(rows, cols, a.to_vec(), b.to_vec(), cost, &mut memo)
}

const PEEL_EPS: f64 = 1e-13;

type PeelKey = (u32, u32, Vec<i64>);

fn peel(rows: u32, cols: u32, a: Vec<f64>, b: Vec<f64>, cost: &[Vec<f64>], memo: &mut HashMap<PeelKey, f64>) -> f64 {
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let key: PeelKey = (rows, cols, a.iter().chain(&b).map(|v| (v * (1u64 << 44) as f64).round() as i64).collect());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut best = f64::INFINITY;
    for i in (0..a.len()).filter(|i| rows >> i & 1 == 1) {
        for j in (0..b.len()).filter(|j| cols >> j & 1 == 1) {
            let m = a[i].min(b[j]);
            let (mut na, mut nb) = (a.clone(), b.clone());
            na[i] -= m;
            nb[j] -= m;
            let mut nr = rows;
            let mut nc = cols;
            if na[i] <= PEEL_EPS {
                nr &= !(1 << i);
                na[i] = 0.0;
            }
            if nb[j] <= PEEL_EPS {
                nc &= !(1 << j);
                nb[j] = 0.0;
            }
            let v = m * cost[i][j] + peel(nr, nc, na, nb, cost, memo);
            best = best.min(v);
        }
    }
    memo.insert(key, best);
    best
}

/// `W_p` through [`transport_vertex_min`] on the two supports.
pub fn w_p_vertex<M: MetricSpace + ?Sized>(space: &M, mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> f64 {
    let (sa, sb) = (mu.support(), nu.support());
    let a: Vec<f64> = sa.iter().map(|&i| mu.weights()[i]).collect();
    let b: Vec<f64> = sb.iter().map(|&j| nu.weights()[j]).collect();
    let cost: Vec<Vec<f64>> = sa.iter().map(|&i| sb.iter().map(|&j| space.dist(i, j).powf(p)).collect()).collect();
    transport_vertex_min(&a, &b, &cost).max(0.0).powf(1.0 / p)
}

/// Tracing corrections from one dense solve of
/// `A w_k − w_{k+1} = e_k` with, for each eigenvalue `λ` and left
/// eigenvector `l`, the edge condition `l·w_0 = 0` when `|λ| < 1` and
/// `l·w_{L−1} = 0` when `|λ| > 1`.
pub fn dense_tracing_corrections(a: &IntMatrix2, ordered: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let l = ordered.len();
    let [[p, q], [r, s]] = a.0.map(|row| row.map(|v| v as f64));
    let tr = p + s;
    let det = p * s - q * r;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let lambdas = [(tr + disc) / 2.0, (tr - disc) / 2.0];
    let n = 2 * l;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for k in 0..l.saturating_sub(1) {
        let e = [
            wrap(ordered[k + 1][0] - (p * ordered[k][0] + q * ordered[k][1])),
            wrap(ordered[k + 1][1] - (r * ordered[k][0] + s * ordered[k][1])),
        ];
        let row = 2 * k;
        m[(row, 2 * k)] = p;
        m[(row, 2 * k + 1)] = q;
        m[(row + 1, 2 * k)] = r;
        m[(row + 1, 2 * k + 1)] = s;
        m[(row, 2 * k + 2)] = -1.0;
        m[(row + 1, 2 * k + 3)] = -1.0;
        rhs[row] = e[0];
        rhs[row + 1] = e[1];
    }
    for (t, &lam) in lambdas.iter().enumerate() {
        let left = if r != 0.0 { [r, lam - p] } else { [lam - s, q] };
        let at = if lam.abs() < 1.0 { 0 } else { l - 1 };
        let row = n - 2 + t;
        m[(row, 2 * at)] = left[0];
        m[(row, 2 * at + 1)] = left[1];
    }
    let sol = m.lu().solve(&rhs).expect("tracing system is nonsingular for hyperbolic matrices");
    (0..l).map(|k| [sol[2 * k], sol[2 * k + 1]]).collect()
}

fn wrap(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use eqgh_core::metric::FiniteMetricSpace;

    fn line(c: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::line(c).unwrap()
    }

    #[test]
    fn clique_and_relations_agree_on_tiny_spaces() {
        let a = line(&[0.0, 1.0, 3.0]);
        let b = line(&[0.0, 2.0]);
        let c = line(&[0.0]);
        for (x, y) in [(&a, &b), (&b, &c), (&a, &a), (&a, &c)] {
            assert!((gh_clique(x, y) - gh_relations(x, y)).abs() < 1e-12);
        }
        assert_eq!(gh_clique(&b, &c), 1.0);
    }

    #[test]
    fn vertex_transport_small() {
        let c = vec![vec![1.0, 2.0], vec![1.0, 10.0]];
        assert!((transport_vertex_min(&[1.0, 1.0], &[1.0, 1.0], &c) - 3.0).abs() < 1e-12);
        assert_eq!(transport_vertex_min(&[1.0], &[0.25, 0.75], &[vec![4.0, 0.0]]), 1.0);
    }

    #[test]
    fn dense_solve_recovers_zero_for_true_orbits() {
        let cat = IntMatrix2([[2, 1], [1, 1]]);
        let mut orbit = vec![[0.1, 0.7]];
        for _ in 0..20 {
            orbit.push(cat.apply_torus(*orbit.last().unwrap()));
        }
        let w = dense_tracing_corrections(&cat, &orbit);
        assert!(w.iter().all(|v| v[0].abs() < 1e-9 && v[1].abs() < 1e-9));
    }
}
