//! Seeded generators of small metric spaces, maps and measures.

use eqgh_core::metric::{FiniteMetricSpace, PointMap};
use eqgh_core::wasserstein::DiscreteMeasure;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shortest-path closure of a symmetric positive matrix; the result is a
/// metric.
pub fn metric_closure(mut d: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn symmetric<R: Rng>(n: usize, rng: &mut R, mut draw: impl FnMut(&mut R) -> f64) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = draw(rng);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// `n` points with integer distances in `1..=max` (after closure).
pub fn integer_metric<R: Rng>(n: usize, max: u32, rng: &mut R) -> FiniteMetricSpace {
    let d = symmetric(n, rng, |r| r.gen_range(1..=max) as f64);
    FiniteMetricSpace::from_matrix(metric_closure(d)).expect("closure is a metric")
}

/// `n` points with real distances drawn from `[0.5, 3)` (after closure).
pub fn real_metric<R: Rng>(n: usize, rng: &mut R) -> FiniteMetricSpace {
    let d = symmetric(n, rng, |r| r.gen_range(0.5..3.0));
    FiniteMetricSpace::from_matrix(metric_closure(d)).expect("closure is a metric")
}

/// The 30 spaces with at most 5 points and distances in `1..=4` used by the
/// GH oracle comparison.
pub fn gh_fixture_spaces(seed: u64) -> Vec<FiniteMetricSpace> {
    let mut r = rng(seed);
    (0..30).map(|k| integer_metric(1 + k % 5, 4, &mut r)).collect()
}

/// Two bundled three-point spaces: a path `0–1–3` and an equilateral
/// triangle of side 2.
pub fn three_point_pair() -> (FiniteMetricSpace, FiniteMetricSpace) {
    let a = FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).expect("line");
    let b = FiniteMetricSpace::from_matrix(vec![vec![0.0, 2.0, 2.0], vec![2.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]])
        .expect("triangle");
    (a, b)
}

pub fn random_map<R: Rng>(source: usize, target: usize, rng: &mut R) -> PointMap {
    PointMap::new(source, target, (0..source).map(|_| rng.gen_range(0..target)).collect()).expect("in range")
}

/// Weights that are multiples of `1/2^k`, so sums are exact.
pub fn dyadic_measure<R: Rng>(n: usize, rng: &mut R) -> DiscreteMeasure {
    let k = 1u32 << 6;
    let mut w = vec![0u32; n];
    for _ in 0..k {
        w[rng.gen_range(0..n)] += 1;
    }
    DiscreteMeasure::new(w.into_iter().map(|c| c as f64 / k as f64).collect()).expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use eqgh_core::metric::MetricSpace;

    #[test]
    fn fixtures_are_metrics() {
        let spaces = gh_fixture_spaces(0);
        assert_eq!(spaces.len(), 30);
        assert!(spaces.iter().all(|s| s.len() <= 5));
        let s = real_metric(6, &mut rng(1));
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn dyadic_sums_to_one() {
        let mu = dyadic_measure(7, &mut rng(2));
        assert_eq!(mu.weights().iter().sum::<f64>(), 1.0);
    }
}
